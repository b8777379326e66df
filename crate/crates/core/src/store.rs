//! Append-only JSON-lines results store.
//!
//! One record per line, each carrying `"schema": 1` and a `"kind"` tag:
//!
//! ```text
//! {"schema":1,"kind":"census","n":5,"profile_id":"sf-sigma-2n1","count":5,...}
//! {"schema":1,"kind":"special","t":4,"count_with_zero":3,"count_all":4}
//! {"schema":1,"kind":"zp","p":31,"s":10,"count":15,"in_theorem_range":true,...}
//! ```

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::enumerate::CensusRecord;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable that overrides the default store location.
pub const STORE_ENV: &str = "SUMFREE_STORE";
pub const DEFAULT_STORE: &str = "results.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialRow {
    pub t: usize,
    pub count_with_zero: u64,
    pub count_all: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZpRow {
    pub p: usize,
    pub s: usize,
    pub count: u64,
    pub in_theorem_range: bool,
    /// One canonical member per dilation orbit, as sorted arrays.
    pub representatives: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Census(CensusRecord),
    Special(SpecialRow),
    Zp(ZpRow),
}

#[derive(Serialize, Deserialize)]
struct Line {
    schema: u32,
    #[serde(flatten)]
    record: Record,
}

impl Record {
    pub fn to_line(&self) -> Result<String> {
        Ok(serde_json::to_string(&Line {
            schema: SCHEMA_VERSION,
            record: self.clone(),
        })?)
    }

    pub fn from_line(line: &str) -> Result<Record> {
        let parsed: Line = serde_json::from_str(line)?;
        if parsed.schema != SCHEMA_VERSION {
            return Err(Error::Precondition(format!(
                "store record has schema {} (expected {SCHEMA_VERSION})",
                parsed.schema
            )));
        }
        Ok(parsed.record)
    }
}

#[derive(Debug)]
enum Backing {
    File(PathBuf),
    Memory(Vec<String>),
}

/// Single-writer handle on a results file (or an in-memory buffer).
#[derive(Debug)]
pub struct ResultsStore {
    backing: Backing,
}

impl ResultsStore {
    pub fn open(path: impl AsRef<Path>) -> Self {
        ResultsStore {
            backing: Backing::File(path.as_ref().to_path_buf()),
        }
    }

    /// `$SUMFREE_STORE` if set, else `fallback`.
    pub fn from_env_or(fallback: impl AsRef<Path>) -> Self {
        match std::env::var_os(STORE_ENV) {
            Some(p) => ResultsStore::open(p),
            None => ResultsStore::open(fallback),
        }
    }

    pub fn in_memory() -> Self {
        ResultsStore {
            backing: Backing::Memory(Vec::new()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.backing {
            Backing::File(p) => Some(p),
            Backing::Memory(_) => None,
        }
    }

    pub fn append(&mut self, record: &Record) -> Result<()> {
        let line = record.to_line()?;
        match &mut self.backing {
            Backing::File(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                let mut f = OpenOptions::new().create(true).append(true).open(path)?;
                writeln!(f, "{line}")?;
            }
            Backing::Memory(lines) => lines.push(line),
        }
        Ok(())
    }

    pub fn read_all(&self) -> Result<Vec<Record>> {
        match &self.backing {
            Backing::File(path) => {
                let f = match File::open(path) {
                    Ok(f) => f,
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
                    Err(e) => return Err(e.into()),
                };
                let mut out = Vec::new();
                for line in BufReader::new(f).lines() {
                    let line = line?;
                    if !line.trim().is_empty() {
                        out.push(Record::from_line(&line)?);
                    }
                }
                Ok(out)
            }
            Backing::Memory(lines) => lines.iter().map(|l| Record::from_line(l)).collect(),
        }
    }

    pub fn census_records(&self) -> Result<Vec<CensusRecord>> {
        Ok(self
            .read_all()?
            .into_iter()
            .filter_map(|r| match r {
                Record::Census(c) => Some(c),
                _ => None,
            })
            .collect())
    }

    /// Census rows as CSV with header `n,profile_id,count,max_size`.
    pub fn export_csv<W: Write>(&self, out: W) -> Result<()> {
        write_census_csv(&self.census_records()?, out)
    }
}

pub fn write_census_csv<W: Write>(records: &[CensusRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "profile_id", "count", "max_size"])?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.profile_id.clone(),
            r.count.to_string(),
            r.max_size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::IntSet;

    fn sample() -> CensusRecord {
        CensusRecord {
            n: 5,
            profile_id: "sf-sigma-2n1".into(),
            count: 5,
            max_size: 2,
            num_max_witnesses: 1,
            sample_witnesses: vec![IntSet::in_range(5, [4, 5]).unwrap()],
            engine_version: "test".into(),
            wall_time_ms: 0,
        }
    }

    #[test]
    fn line_carries_schema_and_kind() {
        let line = Record::Census(sample()).to_line().unwrap();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["kind"], "census");
        assert_eq!(v["sample_witnesses"][0]["members"], serde_json::json!([4, 5]));
        assert_eq!(Record::from_line(&line).unwrap(), Record::Census(sample()));
    }

    #[test]
    fn rejects_other_schema() {
        let line = r#"{"schema":2,"kind":"special","t":1,"count_with_zero":1,"count_all":1}"#;
        assert!(Record::from_line(line).is_err());
    }

    #[test]
    fn file_store_appends() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = ResultsStore::open(dir.path().join("sub/results.jsonl"));
        assert!(store.read_all().unwrap().is_empty());
        store.append(&Record::Census(sample())).unwrap();
        store
            .append(&Record::Special(SpecialRow {
                t: 2,
                count_with_zero: 1,
                count_all: 1,
            }))
            .unwrap();
        assert_eq!(store.read_all().unwrap().len(), 2);
        assert_eq!(store.census_records().unwrap(), vec![sample()]);

        let mut csv = Vec::new();
        store.export_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "n,profile_id,count,max_size\n5,sf-sigma-2n1,5,2\n"
        );
    }
}

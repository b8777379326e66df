mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use sumfree_core::cyclic::{census_scsf, st_cross_check, PrimeParams, DEFAULT_CENSUS_LIMIT};
use sumfree_core::enumerate::DEFAULT_NODE_BUDGET;
use sumfree_core::store::{write_census_csv, SpecialRow, DEFAULT_STORE};
use sumfree_core::structures::{bijection_g, enumerate_t_special, in_closed_family, inverse_g};
use sumfree_core::{
    census, count_admissible, max_admissible, verify, CensusOptions, ConstraintProfile, EnumTask, Error, Mode, Record,
    ResultsStore,
};

use output::{Format, Output};

#[derive(Parser, Debug)]
#[command(
    name = "sumfree",
    version,
    about = "Count, search and verify sum-free sets that avoid a forbidden sum"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Results store (JSON lines).
    #[arg(long, global = true, env = "SUMFREE_STORE", default_value = DEFAULT_STORE)]
    store: PathBuf,

    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,

    /// Search nodes allowed before giving up (exit 3).
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,

    /// Elements decided before the search fans out; 0 picks a default when
    /// running on several workers.
    #[arg(long, global = true, default_value_t = 0)]
    split_depth: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    output_format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of admissible subsets of [1, n].
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_profile, default_value = "sf-sigma-2n1")]
        profile: ConstraintProfile,
    },
    /// Largest admissible size with its witnesses.
    Max {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_profile, default_value = "sf-sigma-2n1")]
        profile: ConstraintProfile,
        #[arg(long, default_value_t = 16)]
        witness_cap: usize,
    },
    /// Count and maximum for every n in an inclusive range, checked against
    /// and appended to the store.
    Census {
        /// `a..b`, both ends included.
        #[arg(long, value_parser = parse_range)]
        range: (usize, usize),
        #[arg(long, value_parser = parse_profile, default_value = "sf-sigma-2n1")]
        profile: ConstraintProfile,
    },
    /// t-special sets and the bijection onto closed sets.
    Special {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        require_zero: bool,
    },
    /// Symmetric complete sum-free subsets of Z_p.
    Zp {
        #[arg(long)]
        p: usize,
        /// Only this size.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CENSUS_LIMIT)]
        limit: usize,
    },
    /// Engine against oracles plus every structural check.
    Verify {
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        t_max: usize,
    },
}

fn parse_profile(s: &str) -> Result<ConstraintProfile, String> {
    ConstraintProfile::named(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

fn set_json(members: Vec<usize>) -> serde_json::Value {
    json!(members)
}

/// Whether the run passed; `Err` for errors mapped to exit codes.
fn run(cli: Cli, out: &mut impl Write) -> Result<bool, Error> {
    let workers = cli.workers as usize;
    let task = |n: usize, profile: ConstraintProfile, mode: Mode| {
        EnumTask::new(n, profile, mode)
            .workers(workers)
            .split_depth(cli.split_depth.min(n))
            .node_budget(cli.node_budget)
    };
    let mut passed = true;
    let out_data = match cli.command {
        Command::Count { n, profile } => {
            let id = profile.id();
            let count = count_admissible(&task(n, profile, Mode::Count))?;
            let mut o = Output::new(&["n", "profile_id", "count"]);
            o.row(vec![n.to_string(), id.clone(), count.to_string()]);
            o.json
                .push(json!({"schema": 1, "n": n, "profile_id": id, "count": count}).to_string());
            o
        }
        Command::Max {
            n,
            profile,
            witness_cap,
        } => {
            let id = profile.id();
            let m = max_admissible(&task(n, profile, Mode::Max).witness_cap(witness_cap))?;
            let mut o = Output::new(&["n", "profile_id", "max_size", "num_witnesses", "witness"]);
            for w in &m.witnesses {
                o.row(vec![
                    n.to_string(),
                    id.clone(),
                    m.size.to_string(),
                    m.num_witnesses.to_string(),
                    w.to_string(),
                ]);
            }
            o.json.push(
                json!({
                    "schema": 1,
                    "n": n,
                    "profile_id": id,
                    "max_size": m.size,
                    "num_witnesses": m.num_witnesses,
                    "witnesses": m.witnesses.iter().map(|w| set_json(w.to_vec())).collect::<Vec<_>>(),
                })
                .to_string(),
            );
            o
        }
        Command::Census {
            range: (lo, hi),
            profile,
        } => {
            let mut store = ResultsStore::open(&cli.store);
            let opts = CensusOptions {
                workers,
                split_depth: cli.split_depth,
                node_budget: cli.node_budget,
                ..CensusOptions::default()
            };
            let records = census(lo, hi, &profile, &mut store, &opts)?;
            if cli.output_format == Format::Csv {
                write_census_csv(&records, &mut *out)?;
                return Ok(true);
            }
            let mut o = Output::new(&["n", "profile_id", "count", "max_size", "num_max_witnesses"]);
            for r in &records {
                o.row(vec![
                    r.n.to_string(),
                    r.profile_id.clone(),
                    r.count.to_string(),
                    r.max_size.to_string(),
                    r.num_max_witnesses.to_string(),
                ]);
                o.json.push(Record::Census(r.clone()).to_line()?);
            }
            o
        }
        Command::Special { t, require_zero } => {
            let all = enumerate_t_special(t, false, cli.node_budget)?;
            let row = SpecialRow {
                t,
                count_with_zero: all.iter().filter(|s| s.members.contains(0)).count() as u64,
                count_all: all.len() as u64,
            };
            let mut o = Output::new(&["t", "set", "closed_image"]);
            let mut bad = Vec::new();
            for s in all.iter().filter(|s| !require_zero || s.members.contains(0)) {
                let image = if s.members.contains(0) {
                    let g = bijection_g(s)?;
                    if !in_closed_family(&g.members, t - 1) || inverse_g(&g, t)? != *s {
                        bad.push(s.members.to_string());
                    }
                    g.members.to_string()
                } else {
                    "-".into()
                };
                o.row(vec![t.to_string(), s.members.to_string(), image]);
            }
            passed &= bad.is_empty();
            o.notes.push(format!(
                "{} set(s); with 0: {}, all: {}; bijection {}",
                o.rows.len(),
                row.count_with_zero,
                row.count_all,
                if bad.is_empty() {
                    "ok".to_string()
                } else {
                    format!("FAILED on {}", bad.join(" "))
                }
            ));
            let record = Record::Special(row);
            remember(&cli.store, &record, |r| matches!(r, Record::Special(x) if x.t == t))?;
            o.json.push(record.to_line()?);
            o
        }
        Command::Zp { p, s, limit } => {
            let rows = census_scsf(p, s, workers, limit)?;
            let mut o = Output::new(&["p", "size", "count", "orbits", "in_theorem_range", "representative"]);
            for r in &rows {
                o.row(vec![
                    p.to_string(),
                    r.size.to_string(),
                    r.count.to_string(),
                    r.representatives.len().to_string(),
                    r.in_theorem_range.to_string(),
                    r.representatives.first().map(|z| z.to_string()).unwrap_or_default(),
                ]);
                let record = Record::Zp(r.to_store_row());
                let size = r.size;
                remember(
                    &cli.store,
                    &record,
                    |x| matches!(x, Record::Zp(z) if z.p == p && z.s == size),
                )?;
                o.json.push(record.to_line()?);
            }
            for size in PrimeParams::sizes_for(p)
                .into_iter()
                .filter(|&x| s.is_none_or(|s| s == x))
            {
                let c = st_cross_check(p, size, workers, limit, cli.node_budget)?;
                // Below 0.318p the S_T family need not exhaust
                // the census, so only in-range sizes decide the exit status.
                if c.in_theorem_range {
                    passed &= c.passed();
                }
                o.notes.push(format!(
                    "s={size} t={}: census {} vs (p-1)/2 x {} t-special = {}; dilations of S_T {}; {}",
                    c.params.t,
                    c.census_count,
                    c.special_count,
                    (p as u64 - 1) / 2 * c.special_count,
                    if c.census_equals_dilations { "match" } else { "differ" },
                    if c.passed() {
                        "PASS"
                    } else if c.in_theorem_range {
                        "FAIL"
                    } else {
                        "outside the covered range"
                    },
                ));
            }
            o
        }
        Command::Verify { n_max, t_max } => {
            let report = verify::run(&verify::VerifyOptions {
                n_max,
                t_max,
                workers,
                node_budget: cli.node_budget,
            })?;
            passed &= report.passed();
            let mut o = Output::new(&["check", "status", "detail"]);
            for c in &report.checks {
                o.row(vec![
                    c.name.to_string(),
                    if c.passed { "PASS" } else { "FAIL" }.to_string(),
                    c.detail.clone(),
                ]);
                o.json
                    .push(json!({"schema": 1, "check": c.name, "passed": c.passed, "detail": c.detail}).to_string());
            }
            o.notes.push(if passed { "PASS" } else { "FAIL" }.to_string());
            o
        }
    };
    out_data.emit(cli.output_format, out)?;
    Ok(passed)
}

/// Appends `record` unless a record with the same key exists, in which case
/// the two must agree.
fn remember(path: &PathBuf, record: &Record, same_key: impl Fn(&Record) -> bool) -> Result<(), Error> {
    let mut store = ResultsStore::open(path);
    match store.read_all()?.into_iter().find(|r| same_key(r)) {
        Some(stored) if stored != *record => Err(Error::CensusMismatch {
            key: format!("{record:?}"),
            stored: format!("{stored:?}"),
            computed: format!("{record:?}"),
        }),
        Some(_) => Ok(()),
        None => store.append(record),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::CensusMismatch { .. } | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sumfree: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

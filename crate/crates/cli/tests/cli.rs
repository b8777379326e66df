use std::path::Path;
use std::process::{Command, Output};

use sumfree_core::store::ResultsStore;
use sumfree_core::Record;

fn sumfree(store: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumfree"))
        .args(args)
        .env("SUMFREE_STORE", store)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = sumfree(
        &dir.path().join("r.jsonl"),
        &[
            "count",
            "--n",
            "3",
            "--profile",
            "sf-sigma-2n1",
            "--output-format",
            "json",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["count"], 3);
}

#[test]
fn max_reports_top_interval() {
    let dir = tempfile::tempdir().unwrap();
    let o = sumfree(
        &dir.path().join("r.jsonl"),
        &["max", "--n", "5", "--output-format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["max_size"], 2);
    assert_eq!(v["witnesses"], serde_json::json!([[4, 5]]));
}

#[test]
fn census_round_trips_through_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("r.jsonl");
    let args = [
        "census",
        "--range",
        "1..16",
        "--profile",
        "sf-3a-2n1",
        "--output-format",
        "json",
    ];
    let first = sumfree(&store, &args);
    assert_eq!(first.status.code(), Some(0));
    let printed: Vec<Record> = stdout(&first).lines().map(|l| Record::from_line(l).unwrap()).collect();
    assert_eq!(printed.len(), 16);
    assert_eq!(ResultsStore::open(&store).read_all().unwrap(), printed);

    // A second run agrees with the store and appends nothing.
    assert_eq!(sumfree(&store, &args).status.code(), Some(0));
    assert_eq!(ResultsStore::open(&store).read_all().unwrap().len(), 16);
}

#[test]
fn census_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("r.jsonl");
    assert_eq!(sumfree(&store, &["census", "--range", "1..3"]).status.code(), Some(0));
    let text = std::fs::read_to_string(&store).unwrap();
    std::fs::write(&store, text.replacen("\"count\":3", "\"count\":4", 1)).unwrap();
    let o = sumfree(&store, &["census", "--range", "1..3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn census_csv_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let o = sumfree(
        &dir.path().join("r.jsonl"),
        &["census", "--range", "1..3", "--output-format", "csv"],
    );
    assert_eq!(
        stdout(&o),
        "n,profile_id,count,max_size\n1,sf-sigma-2n1,1,0\n2,sf-sigma-2n1,2,1\n3,sf-sigma-2n1,3,1\n"
    );
}

#[test]
fn special_two_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = sumfree(
        &dir.path().join("r.jsonl"),
        &["special", "--t", "2", "--require-zero", "--output-format", "csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains("{0,2}"));
}

#[test]
fn zp_31_has_fifteen_of_size_ten() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("r.jsonl");
    let o = sumfree(&store, &["zp", "--p", "31", "--output-format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<Record> = stdout(&o).lines().map(|l| Record::from_line(l).unwrap()).collect();
    assert!(rows
        .iter()
        .any(|r| matches!(r, Record::Zp(z) if z.s == 10 && z.count == 15)));
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sumfree(
        &dir.path().join("r.jsonl"),
        &["verify", "--n-max", "16", "--t-max", "10", "--workers", "2"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().last(), Some("PASS"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("r.jsonl");
    assert_eq!(
        sumfree(&store, &["count", "--n", "3", "--profile", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sumfree(&store, &["count"]).status.code(), Some(2));
    assert_eq!(
        sumfree(&store, &["count", "--n", "3", "--workers", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(sumfree(&store, &["zp", "--p", "33"]).status.code(), Some(2));
    assert_eq!(sumfree(&store, &["census", "--range", "3-5"]).status.code(), Some(2));
}

#[test]
fn budget_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = sumfree(
        &dir.path().join("r.jsonl"),
        &["count", "--n", "40", "--node-budget", "100"],
    );
    assert_eq!(o.status.code(), Some(3));
}

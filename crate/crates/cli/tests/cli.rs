use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run_with(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hurwitz"));
    match cache {
        Some(p) => cmd.arg("--cache").arg(p),
        None => cmd.arg("--no-cache"),
    };
    cmd.args(args).output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with(None, args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn check_exit_codes() {
    let o = run(&["check", "4:[3,1];[2,2];[2,2]"]);
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(json_lines(&o)[0]["status"], "exceptional");

    let o = run(&["check", "4:[2,2];[2,2];[2,2]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["status"], "realizable");

    let o = run(&["--budget", "3", "check", "8:[3,3,2];[3,3,2];[2,2,2,2]"]);
    assert_eq!(o.status.code(), Some(20));
}

#[test]
fn input_errors_leave_stdout_empty() {
    for args in [
        &["check", "4:[3,1];[2,2]"][..],
        &["check", "4:[3,1;[2,2]"],
        &["analyze", "num:[0,1]; den:[1]"],
        &["analyze", "zeros: 1, ?"],
        &["families", "Z9"],
        &["enumerate", "1", "3"],
        &["lift", "--power", "--k", "2"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let o = run(&["check", "4:[3,1;[2,2]"]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("position 6"), "{err}");
    assert!(err.contains("\n        ^"), "{err}");
    let o = run(&["check", "4:[3,1];[2,2]"]);
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("Riemann-Hurwitz"));
}

#[test]
fn enumeration_examples() {
    let rows = json_lines(&run(&["enumerate", "4", "3", "--decide"]));
    let exceptional: Vec<&Value> = rows
        .iter()
        .filter(|v| v["status"] == "exceptional")
        .collect();
    assert_eq!(exceptional.len(), 1);
    assert_eq!(exceptional[0]["datum"], "4:[3,1];[2,2];[2,2]");

    let rows = json_lines(&run(&["enumerate", "2", "2"]));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["datum"], "2:[2];[2]");

    let rows = json_lines(&run(&["enumerate", "5", "3", "--decide"]));
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|v| v["status"] == "realizable"));
}

fn fiber_set(report: &Value) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let value = match &e["value"] {
                Value::String(s) => s.clone(),
                v => format!(
                    "{:.6}{:+.6}i",
                    v["re"].as_f64().unwrap() + 0.0,
                    v["im"].as_f64().unwrap() + 0.0
                ),
            };
            (value, e["partition"].as_str().unwrap().to_string())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn analyze_examples() {
    let map = "num:[-1,0,0,1]; den:[1,0,0,1]";
    let o = run(&["analyze", map]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["degree"], 3);
    assert_eq!(r["total_branching"], 4);
    let values: Vec<(String, String)> = fiber_set(r);
    assert_eq!(values.len(), 2);
    assert!(values.iter().all(|(_, p)| p == "[3]"));

    let r = &json_lines(&run(&["analyze", "--power", "2", map]))[0];
    assert_eq!(r["datum"], "6:[3,3];[2,2,2];[2,2,2]");
    let parts: Vec<(String, String)> = fiber_set(r);
    assert!(parts.contains(&("infinity".into(), "[2,2,2]".into())));
    assert!(parts.contains(&("1.000000+0.000000i".into(), "[3,3]".into())));
}

#[test]
fn families_and_lifts() {
    let rows = json_lines(&run(&["families", "Z1a", "--k", "3..6", "--decide"]));
    assert!(rows.len() >= 4);
    assert!(rows
        .iter()
        .all(|v| v["verdict"]["status"] == "exceptional" && v["agrees"] == true));

    let o = run(&[
        "lift",
        "--roots-of-unity",
        "--r",
        "3",
        "--splits",
        "[3];[2,1];[2,1]",
        "--x",
        "[1,1,1]",
        "--y",
        "[1,1,1]",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = &json_lines(&o)[0];
    let expected: hurwitz::datum::BranchingDatum = "9:[3,1,1,2,2];[3,3,3];[3,3,3]".parse().unwrap();
    assert_eq!(v["datum"], expected.to_string());
    let trace: hurwitz::criteria::Trace = serde_json::from_value(v["trace"].clone()).unwrap();
    assert_eq!(trace.replay().unwrap(), expected);

    let v = &json_lines(&run(&[
        "lift",
        "--power",
        "--k",
        "2",
        "3:[2,1];[2,1];[2,1]",
    ]))[0];
    let expected: hurwitz::datum::BranchingDatum = "6:[2,1,1,1,1];[4,2];[4,2]".parse().unwrap();
    assert_eq!(v["datum"], expected.to_string());
}

#[test]
fn warm_cache_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("verdicts.jsonl");
    let args = ["enumerate", "6", "3", "--decide"];
    let cold = run_with(Some(&cache), &args);
    let records = std::fs::read_to_string(&cache).unwrap();
    assert!(!records.is_empty());
    let warm = run_with(Some(&cache), &args);
    assert_eq!(
        std::fs::read_to_string(&cache).unwrap(),
        records,
        "warm run appended"
    );
    let none = run(&args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, none.stdout);

    let mut damaged = records.clone();
    damaged.push_str("{\"key\": truncated\n");
    std::fs::write(&cache, damaged).unwrap();
    let again = run_with(Some(&cache), &args);
    assert_eq!(again.stdout, cold.stdout);
    assert!(String::from_utf8(again.stderr)
        .unwrap()
        .contains("skipping corrupt"));

    let tighter = run_with(
        Some(&cache),
        &["--budget", "5", "enumerate", "6", "3", "--decide"],
    );
    assert_ne!(
        tighter.stdout, cold.stdout,
        "records from other settings were reused"
    );
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--seed", "3", "--maps", "30", "--lifts", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(json_lines(&o)[0]["passed"], true);
}

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn latmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latmax"))
        .args(args)
        .env_remove("LATMAX_THREADS")
        .output()
        .expect("binary runs")
}

fn summary(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is the JSON summary")
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = latmax(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_and_missing_seed_are_usage_errors() {
    assert_eq!(
        latmax(&["comparison", "--bogus", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(latmax(&["comparison"]).status.code(), Some(2));
    assert_eq!(
        latmax(&["counterexample", "--p", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        latmax(&["semigroup-check", "--seed", "1", "--side", "12"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn counterexample_example() {
    let out = latmax(&["counterexample", "--r", "4", "--p", "1.5", "--M", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["command"], "counterexample");
    assert_eq!(s["pass"], true);
    assert_eq!(s["params"]["M"], 1);
    let lower = s["results"]["exact"]["ratio_lower"].as_f64().unwrap();
    assert!(lower >= 0.2 * 4f64.powf(2.0 / 3.0));
    let keys: Vec<&String> = s.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "params", "pass", "results", "seed"]);
}

#[test]
fn multipliers_report() {
    let out = latmax(&[
        "verify-multipliers",
        "--d",
        "1..2",
        "--samples",
        "200",
        "--n-max",
        "8",
        "--seed",
        "7",
        "--product-draws",
        "1000",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(&out);
    assert_eq!(s["params"]["samples"], 200);
    assert_eq!(s["params"]["dims"], serde_json::json!([1, 2]));
    let reports = s["results"]["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports[0].get("observed_constant").is_some());
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let out_dir = dir.path().join(i.to_string());
        let out = latmax(&[
            "variation-check",
            "--seed",
            "11",
            "--samples",
            "40",
            "--d",
            "1,2",
            "--threads",
            threads,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        csvs.push(fs::read(out_dir.join("variation-check.csv")).unwrap());
        assert!(out_dir.join("variation-check.json").exists());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[1], csvs[2]);
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    assert!(text.starts_with("d,param,value,bound,pass\n"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# defaults\nseed = 3\nsamples = 7\nd = 1\n").unwrap();
    let out = latmax(&[
        "comparison",
        "--config",
        cfg.to_str().unwrap(),
        "--samples",
        "4",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(&out);
    assert_eq!(s["seed"], 3);
    assert_eq!(s["params"]["functions"], 4);
    assert_eq!(s["params"]["dims"], serde_json::json!([1]));

    fs::write(&cfg, "nonsense = 1\n").unwrap();
    let out = latmax(&[
        "comparison",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_latmax"))
        .args(["counterexample"])
        .env("LATMAX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

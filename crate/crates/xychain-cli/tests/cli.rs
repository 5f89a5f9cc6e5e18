//! End-to-end checks of the compiled binary: output formats, exit codes,
//! and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_xychain"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("xychain-cli-test-{}-{name}", std::process::id()));
    p
}

fn grab(text: &str, key: &str) -> f64 {
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix(key) {
            let rest = rest.trim_start();
            if let Some(v) = rest.strip_prefix('=') {
                return v.trim().parse().unwrap_or_else(|_| panic!("bad number in {line}"));
            }
        }
    }
    panic!("missing key {key} in output:\n{text}");
}

#[test]
fn point_reproduces_the_critical_ising_values() {
    let out = run(&["point", "--gamma", "1", "--T", "0", "--lambda", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let pi = std::f64::consts::PI;
    assert!((grab(&text, "m  ") + 2.0 / pi).abs() < 1e-5);
    assert!((grab(&text, "cxx") - 2.0 / pi).abs() < 1e-5);
    assert!((grab(&text, "cyy") + 2.0 / (3.0 * pi)).abs() < 1e-5);
    assert!((grab(&text, "czz") - 16.0 / (3.0 * pi * pi)).abs() < 1e-5);
    assert!(text.contains("lqu/pair"));
    assert!(text.contains("single_spin_eigenvalues"));
}

#[test]
fn point_json_is_well_formed() {
    let out = run(&[
        "point", "--gamma", "0.5", "--T", "0.1", "--lambda", "0.9", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["config"]["command"], "point");
    assert!(doc["m"].as_f64().unwrap() < 0.0);
    assert_eq!(doc["two_spin_eigenvalues"].as_array().unwrap().len(), 4);
    assert!(doc["measures"]["lqc-x/pair"].as_f64().is_some());
}

#[test]
fn scan_writes_deterministic_csv_with_config_header() {
    let path = tmp_path("scan.csv");
    let args = [
        "scan", "--gamma", "0.5", "--T", "0", "--measure", "lqc-x", "--target", "single",
        "--r", "1", "--lambda", "0.8:1.2:0.01", "--out", path.to_str().unwrap(),
    ];
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let first = std::fs::read(&path).unwrap();
    let text = String::from_utf8_lossy(&first);
    assert!(text.contains("# command = scan"));
    assert!(text.contains("# gamma = 0.5"));
    assert!(text.contains("# measure = lqc-x/single"));
    assert!(text.contains("lambda,value,d1,d2"));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 41, "header plus 41 grid points");

    // byte-identical rerun
    let out = run(&args);
    assert!(out.status.success());
    let second = std::fs::read(&path).unwrap();
    assert_eq!(first, second);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn scan_json_format_parses() {
    let out = run(&[
        "scan", "--gamma", "0.5", "--T", "0", "--measure", "lqu", "--target", "pair",
        "--lambda", "0.5:0.9:0.02", "--format", "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["columns"].as_array().unwrap().len(), 4);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 21);
}

#[test]
fn estimate_cp_emits_the_report_schema() {
    let out = run(&[
        "estimate-cp", "--gamma", "0.5", "--T", "0.1", "--measure", "lqc-x-lower",
        "--target", "single", "--lambda", "0.9:1.1:0.002",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lambda_hat = doc["lambda_hat"].as_f64().unwrap();
    assert!((lambda_hat - 1.0).abs() < 0.05, "lambda_hat = {lambda_hat}");
    assert_eq!(doc["temperature"].as_f64().unwrap(), 0.1);
    assert_eq!(doc["measure"], "lqc-x-lower/single");
    assert_eq!(doc["window"].as_array().unwrap().len(), 2);
    assert!(doc["step"].as_f64().unwrap() > 0.0);
}

#[test]
fn validation_errors_exit_one_and_name_the_flag() {
    let out = run(&[
        "scan", "--gamma", "1.5", "--T", "0", "--measure", "lqc-x",
        "--lambda", "0.8:1.2:0.01",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("--gamma"), "{}", stderr(&out));

    let out = run(&[
        "scan", "--gamma", "0.5", "--T", "0", "--measure", "lqc-x",
        "--lambda", "0.8:1.2:0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--lambda"), "{}", stderr(&out));

    let out = run(&[
        "scan", "--gamma", "0.5", "--T", "0", "--measure", "lqu", "--target", "single",
        "--lambda", "0.8:1.2:0.01",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--target"), "{}", stderr(&out));

    let out = run(&["scan", "--bogus-flag", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&[
        "estimate-fp", "--gamma", "0.5", "--T", "0.05", "--measure", "lqc-x-lower",
        "--target", "pair", "--lambda", "1.05:1.3:0.002",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--measure"), "{}", stderr(&out));

    let out = run(&[
        "estimate-cp", "--gamma", "0.5", "--T", "0", "--measure", "lqc-x",
        "--target", "single", "--lambda", "0.9:1.1:0.002",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--T"), "{}", stderr(&out));
}

#[test]
fn numerical_failure_exits_two() {
    // no interior extremum of |d1| far away from the transition
    let out = run(&[
        "estimate-cp", "--gamma", "0.5", "--T", "0.2", "--measure", "lqc-x",
        "--target", "single", "--lambda", "1.5:1.8:0.01",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("extremum"), "{}", stderr(&out));
}

#[test]
fn oracle_check_passes_on_a_small_ring() {
    let out = run(&[
        "oracle-check", "--n-sites", "6", "--gamma", "1", "--lambda", "0.5",
        "--beta", "5", "--tol-chain", "0.05",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: OK"), "{text}");
    assert!(text.contains("finite_chain_dm"));

    // unreachable tolerance must map to the numerical exit code
    let out = run(&[
        "oracle-check", "--n-sites", "4", "--gamma", "1", "--lambda", "0.5",
        "--beta", "5", "--tol-chain", "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

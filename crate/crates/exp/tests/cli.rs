use std::path::Path;

use ladmm_exp::cli::run_cli;
use ladmm_exp::trace::read_trace;
use ladmm_exp::{RunReport, TRACE_COLUMNS};
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["ladmm"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn check_params_auto_prints_lasso_certificate() {
    let (code, out) = cli(&["check-params"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["l_y"], 9.0);
    assert_eq!(v["beta"], 243.0);
    assert_eq!(v["l_x"], 268.0);
    assert_eq!(v["certified"], true);

    let (code, _) = cli(&["check-params", "--params", "auto"]);
    assert_eq!(code, 0);
}

#[test]
fn check_params_manual_reports_violation() {
    let (code, out) = cli(&["check-params", "--beta", "12", "--lx", "37", "--ly", "8"]);
    assert_ne!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certified"], false);
    let names: Vec<&str> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"beta >= 3*L_y^2/lambda_BB"), "{names:?}");
}

fn run_lasso_to(dir: &Path) -> (i32, Vec<u8>) {
    let (code, _) = cli(&[
        "lasso",
        "--n",
        "16",
        "--m",
        "8",
        "--seed",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ]);
    (code, std::fs::read(dir.join("trace.csv")).unwrap())
}

#[test]
fn lasso_traces_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (c1, t1) = run_lasso_to(&tmp.path().join("a"));
    let (c2, t2) = run_lasso_to(&tmp.path().join("b"));
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(t1, t2);

    let text = String::from_utf8(t1).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRACE_COLUMNS.join(","));
    let rows = read_trace(&tmp.path().join("a/trace.csv")).unwrap();
    assert!(!rows.is_empty());
    assert_eq!(rows[0].iter, 1);

    let report_text = std::fs::read_to_string(tmp.path().join("a/report.json")).unwrap();
    let report = RunReport::from_json(&report_text).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.generator, "splitmix64-box-muller");
    assert_eq!(report.iterations, rows.len());
    assert_eq!(RunReport::from_json(&report.to_json().unwrap()).unwrap(), report);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["version"]).0, 0);
    assert_eq!(cli(&["lasso", "--bogus"]).0, 3);
    assert_eq!(cli(&["frobnicate"]).0, 3);
    assert_eq!(cli(&["lasso", "--n", "10", "--m", "4", "--blocks", "3"]).0, 3);
    assert_eq!(cli(&["lasso", "--n", "8", "--m", "4", "--max-iters", "3", "--diag", "off"]).0, 2);
    assert_eq!(cli(&["intprog", "--set", "0..5", "--mu", "0"]).0, 3);
}

#[test]
fn intprog_reports_solution() {
    let (code, out) = cli(&["intprog", "--set", "0..5", "--target", "2.3", "--diag", "assert"]);
    assert_eq!(code, 0);
    let report = RunReport::from_json(&out).unwrap();
    assert_eq!(report.solution, Some(vec![2.0]));
    assert!(report.certified);
}

#[test]
fn assert_level_lasso_run_passes() {
    let (code, out) = cli(&["lasso", "--n", "32", "--m", "8", "--blocks", "4", "--seed", "3", "--diag", "assert"]);
    assert_eq!(code, 0, "{out}");
}

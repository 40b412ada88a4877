//! End-to-end checks of the `qdl` binary: outputs and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn problems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn qdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdl")).args(args).output().expect("binary runs")
}

fn file(name: &str) -> String {
    problems().join(name).to_string_lossy().into_owned()
}

#[test]
fn analyze_exit_codes() {
    let ok = qdl(&["analyze", &file("flagship.json")]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["report"]["overall"], true);

    let small = qdl(&["analyze", &file("small_dimension.json")]);
    assert_eq!(small.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&small.stdout).unwrap();
    assert_eq!(v["report"]["dim_ok"], false);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"d\":2,\"s\":1,\n\"Q\":[[1,0],[0,\"1/0\"]],\"M\":[[1,0]],\"a\":0}").unwrap();
    let out = qdl(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(qdl(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(qdl(&["verify-algebra", "--params", "1,1"]).status.code(), Some(64));
    assert_eq!(qdl(&["analyze", "/nonexistent/problem.json"]).status.code(), Some(64));
    assert_eq!(qdl(&["--help"]).status.code(), Some(0));
}

#[test]
fn reduce_writes_verified_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let st = qdl(&["reduce", &file("flagship.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    for k in ["g_d", "g_s", "params", "verified"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["verified"], true);
    assert_eq!((v["params"]["r"].as_u64(), v["params"]["n"].as_u64()), (Some(2), Some(2)));
}

#[test]
fn verify_algebra_scorecard() {
    let out = qdl(&["verify-algebra", "--params", "1,1,1", "--samples", "100", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty() && checks.iter().all(|c| c["pass"] == true));
    let one = qdl(&["verify-algebra", "--params", "1,1,1,0,0,1", "--format", "csv"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&one.stdout).starts_with("check,pass,checked,witness"));
    // sigma_1 = r + i1 + i3 < 0
    assert_eq!(qdl(&["verify-algebra", "--params", "0,0,1,0,0,-1", "--r", "0"]).status.code(), Some(64));
}

#[test]
fn enumerate_json_lines_and_summary() {
    let out = qdl(&["enumerate", &file("flagship.json"), "--H", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let summary: serde_json::Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(summary["H"], 2);
    assert_eq!(summary["exhaustive"], true);
    assert_eq!(summary["count"].as_u64().unwrap() as usize, lines.len() - 1);
    for l in &lines[..lines.len() - 1] {
        let x: Vec<i64> = serde_json::from_str(l).unwrap();
        assert_eq!(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], x[3] * x[3] + x[4] * x[4]);
    }
    let orbit = qdl(&["enumerate", &file("flagship.json"), "--H", "3", "--orbit", "--budget", "1"]);
    let text = String::from_utf8(orbit.stdout).unwrap();
    let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["exhaustive"], false);
}

#[test]
fn node_budget_env_truncates() {
    let out = Command::new(env!("CARGO_BIN_EXE_qdl"))
        .args(["enumerate", &file("flagship.json"), "--H", "6"])
        .env("QDL_NODE_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["exhaustive"], false);
    let bad = Command::new(env!("CARGO_BIN_EXE_qdl"))
        .args(["enumerate", &file("flagship.json"), "--H", "2"])
        .env("QDL_NODE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn density_reports_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let src = std::fs::read_to_string(problems().join("flagship.json")).unwrap();
    std::fs::write(&spec, src.replace("[10, 20, 40, 60]", "[1, 2, 3]")).unwrap();
    let (out, csv) = (dir.path().join("r.json"), dir.path().join("c.csv"));
    let st = qdl(&["density", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(0));
    let table = std::fs::read_to_string(csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("H,points,coverage,max_gap"));
    let cov: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(cov.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(cov.last(), Some(&1.0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v["levels"][2]["nearest"][0]["witness"].is_array());

    let ctl = qdl(&["density", "--spec", &file("rational_control.json"), "--format", "csv"]);
    assert_eq!(ctl.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&ctl.stdout).contains("5,4153,"));
    let none = qdl(&["density", "--spec", &file("small_dimension.json")]);
    assert_eq!(none.status.code(), Some(64));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn tailgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailgf"))
        .args(args)
        .env_remove("TAILGF_THREADS")
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn binary(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "binary.json",
        r#"{"type": "finite", "p": [0.4, 0.0, 0.4], "defect": 0.2}"#,
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn transition_at_time_zero_is_identity() {
    let dir = TempDir::new().unwrap();
    let law = binary(&dir);
    let v = json_of(&tailgf(&[
        "transition",
        "--law",
        p(&law),
        "--t",
        "0",
        "--s",
        "0.3",
    ]));
    assert_eq!(v["value"], 0.3);
    assert_eq!(v["method"], "ode");
}

#[test]
fn profile_of_defective_binary() {
    let dir = TempDir::new().unwrap();
    let law = binary(&dir);
    let v = json_of(&tailgf(&["profile", "--law", p(&law)]));
    let close = |key: &str, x: f64| (v[key].as_f64().unwrap() - x).abs() < 1e-12;
    assert!(close("q", 0.5) && close("r", 2.0) && close("alpha", 0.6));
    assert!(close("beta", 0.6) && close("gamma", 1.0));
    assert_eq!(v["regime"], "defective_extendable");
}

#[test]
fn csv_grid_round_trips_through_text() {
    let dir = TempDir::new().unwrap();
    let law = binary(&dir);
    let out_path = dir.path().join("grid.csv");
    let args = [
        "transition",
        "--law",
        p(&law),
        "--t",
        "0.5,2",
        "--s",
        "0,0.9",
        "--method",
        "all",
    ];
    let out = tailgf(&[&args[..], &["--format", "csv", "--out", p(&out_path)]].concat());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let json = json_of(&tailgf(&args));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,s,method,value,err_estimate");
    let rows: Vec<&str> = lines.collect();
    let records = json.as_array().unwrap();
    // 2 times x 2 points x (ode, implicit, closed)
    assert_eq!(rows.len(), 12);
    assert_eq!(records.len(), 12);
    for (row, rec) in rows.iter().zip(records) {
        let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(value, rec["value"].as_f64().unwrap());
    }
}

#[test]
fn spec_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"type": "finite", "p": [0.5, 0.6], "defect": 0.0}"#,
    );
    let out = tailgf(&["profile", "--law", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["kind"], "spec");

    let missing = dir.path().join("missing.json");
    assert_eq!(
        tailgf(&["profile", "--law", p(&missing)]).status.code(),
        Some(2)
    );
    assert_eq!(
        tailgf(&["verify", "--suite", "nope"]).status.code(),
        Some(2)
    );
    let law = binary(&dir);
    assert_eq!(
        tailgf(&["critical-expansion", "--law", p(&law)])
            .status
            .code(),
        Some(2)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_tailgf"))
        .args(["profile", "--law", p(&law)])
        .env("TAILGF_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_3() {
    let dir = TempDir::new().unwrap();
    let law = binary(&dir);
    let out = tailgf(&[
        "transition",
        "--law",
        p(&law),
        "--t",
        "1",
        "--s",
        "0.3",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["kind"], "numeric");
}

#[test]
fn simulate_is_deterministic_given_seed() {
    let dir = TempDir::new().unwrap();
    let law = binary(&dir);
    let summary = dir.path().join("summary.json");
    let args = [
        "simulate",
        "--law",
        p(&law),
        "--replicates",
        "2000",
        "--seed",
        "5",
        "--times",
        "1,3",
        "--format",
        "csv",
    ];
    let a = tailgf(&[&args[..], &["--summary", p(&summary)]].concat());
    let b = tailgf(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("replicate,t0,t1,capped,w,z@1,z@3\n"));
    assert_eq!(text.lines().count(), 2001);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(s["replicates"], 2000);
    assert_eq!(s["snapshots"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_with_w_reports_moments() {
    let dir = TempDir::new().unwrap();
    let law = write(
        &dir,
        "quad.json",
        r#"{"type": "finite", "p": [0.2, 0.0, 0.8], "defect": 0.0}"#,
    );
    let v = json_of(&tailgf(&[
        "simulate",
        "--law",
        p(&law),
        "--replicates",
        "500",
        "--seed",
        "1",
        "--horizon",
        "14",
        "--w",
    ]));
    let mean = &v["w"]["mean"];
    let (m, se) = (
        mean["mean"].as_f64().unwrap(),
        mean["std_error"].as_f64().unwrap(),
    );
    assert!((m - 1.0).abs() < 4.0 * se);
}

#[test]
fn limit_law_commands() {
    let dir = TempDir::new().unwrap();
    let law = binary(&dir);
    let y = json_of(&tailgf(&["yaglom", "--law", p(&law), "--n", "10"]));
    let pi = y["coefficients"].as_array().unwrap();
    assert!((pi[0].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let s = json_of(&tailgf(&["survival", "--law", p(&law), "--t", "20"]));
    let row = &s[0];
    let (approx, exact) = (
        row["expansion"].as_f64().unwrap(),
        row["exact"].as_f64().unwrap(),
    );
    assert!((approx - exact).abs() < 1e-9);

    let quad = write(
        &dir,
        "quad.json",
        r#"{"type": "finite", "p": [0.2, 0.0, 0.8], "defect": 0.0}"#,
    );
    let w = json_of(&tailgf(&[
        "wlimit",
        "--law",
        p(&quad),
        "--rho",
        "1",
        "--classical",
    ]));
    let g = &w["grid"][0];
    assert!((g["conditional"].as_f64().unwrap() - 0.75 / 1.75).abs() < 1e-12);
    assert!((g["eta"].as_f64().unwrap() - g["eta_classical"].as_f64().unwrap()).abs() < 1e-8);

    let crit = write(
        &dir,
        "crit.json",
        r#"{"type": "mlf", "p0": 0.5, "p1": 0.125, "p_delta": 0.0, "p": 0.25}"#,
    );
    let c = json_of(&tailgf(&[
        "critical-expansion",
        "--law",
        p(&crit),
        "--n",
        "3",
    ]));
    assert!((c["survival_coefficients"][0].as_f64().unwrap() - 1.5).abs() < 1e-14);

    let fam = write(
        &dir,
        "family.json",
        r#"{"limit": {"type": "finite", "p": [0.5, 0.0, 0.5], "defect": 0.0}}"#,
    );
    let t = json_of(&tailgf(&[
        "termination",
        "--family",
        p(&fam),
        "--eps",
        "1e-4",
        "--u",
        "1",
    ]));
    assert_eq!(t["regime"], "nearly_critical");
    assert!((t["grid"][0]["cdf"].as_f64().unwrap() - 0.5f64.tanh()).abs() < 1e-15);
}

#[test]
fn psi_and_eval() {
    let dir = TempDir::new().unwrap();
    let cubic = write(
        &dir,
        "cubic.json",
        r#"{"type": "trifurcation", "p0": 0.2, "p2": 0.5, "p3": 0.3}"#,
    );
    let v = json_of(&tailgf(&[
        "psi",
        "integral",
        "--law",
        p(&cubic),
        "--a",
        "0.1",
        "--b",
        "0.9",
    ]));
    assert!(v["value"].as_f64().unwrap().is_finite());
    let e = json_of(&tailgf(&["eval", "--law", p(&cubic), "--points", "1,1"]));
    assert!((e["value"].as_f64().unwrap() - 1.9).abs() < 1e-14);
}

#[test]
fn verify_dual_solver_passes() {
    let out = tailgf(&["verify", "--suite", "dual-solver"]);
    let v = json_of(&out);
    assert_eq!(v[0]["passed"], true);
    assert_eq!(v[0]["id"], 1);
}

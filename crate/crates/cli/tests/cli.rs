//! End-to-end runs of the `fracwave` binary.

use std::path::Path;
use std::process::{Command, Output};

fn fracwave(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn solve_writes_archive_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "solve",
            "--alpha",
            "2",
            "--c",
            "1.2181",
            "--n",
            "1024",
            "--out",
            "w.json",
            "--profile",
            "p.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(v["method"], "petviashvili");
    assert_eq!(v["n_points"], 1024);
    assert!((v["c"].as_f64().unwrap() - 1.2181).abs() < 1e-10);
    assert!(v["trace_summary"]["final_res"].as_f64().unwrap() <= 1e-10);
    let profile = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert!(profile.starts_with("x,phi\n"));
    assert_eq!(profile.lines().count(), 1025);
}

#[test]
fn solve_falls_back_to_newton_in_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "solve",
            "--alpha",
            "0.45",
            "--c",
            "0.9",
            "--n",
            "512",
            "--max-iters",
            "400",
            "--newton-modes",
            "512",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(v["method"], "newton");
}

#[test]
fn speed_below_existence_bound_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(&["solve", "--alpha", "2", "--c", "0.4"], dir.path());
    assert_eq!(code(&o), 3);
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("c: 0.4") && msg.contains("1/2"), "{msg}");
    assert!(!dir.path().join("solution.json").exists());
}

#[test]
fn bad_order_and_grid_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fracwave(&["solve", "--alpha", "2.5", "--c", "1"], dir.path())), 3);
    assert_eq!(
        code(&fracwave(
            &["solve", "--alpha", "1", "--c", "1", "--n", "1000"],
            dir.path()
        )),
        3
    );
    assert_eq!(
        code(&fracwave(
            &["sweep", "--alpha", "1", "--c-min", "0.9", "--c-max", "0.8"],
            dir.path()
        )),
        3
    );
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "solve",
            "--alpha",
            "2",
            "--c",
            "1.2",
            "--n",
            "256",
            "--out",
            "missing/dir/w.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 4);
    let o = fracwave(&["evolve", "--input", "nope.json"], dir.path());
    assert_eq!(code(&o), 4);
}

#[test]
fn solver_failure_persists_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "solve",
            "--alpha",
            "2",
            "--w",
            "1.5",
            "--n",
            "256",
            "--max-iters",
            "3",
            "--out",
            "w.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(dir.path().join("w.json.trace.csv")).unwrap();
    assert!(trace.starts_with("n,Error,M_defect,RES\n"));
    assert_eq!(trace.lines().count(), 4);
}

#[test]
fn evolve_zero_data_gives_zero_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "evolve",
            "--zero",
            "--alpha",
            "1",
            "--n",
            "64",
            "--t-final",
            "1",
            "--dt",
            "0.1",
            "--record-every",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ledger = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    let mut lines = ledger.lines();
    assert_eq!(lines.next(), Some("t,E,P,M,supnorm"));
    for line in lines {
        assert!(
            line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0),
            "{line}"
        );
    }
}

#[test]
fn evolve_archived_wave_is_transported() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "solve", "--alpha", "2", "--c", "1.2181", "--n", "256", "--out", "w.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let o = fracwave(
        &[
            "evolve",
            "--input",
            "w.json",
            "--t-final",
            "2",
            "--dt",
            "0.01",
            "--record-every",
            "50",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let drift = std::fs::read_to_string(dir.path().join("drift.csv")).unwrap();
    assert!(drift.starts_with("t,rho,shift\n"));
    let max_rho = drift
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max_rho <= 1e-5, "{max_rho}");
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec![
            "sweep",
            "--alpha",
            "1",
            "--c-min",
            "0.8",
            "--c-max",
            "1.2",
            "--steps",
            "2",
            "--n",
            "512",
            "--no-critical",
            "--out",
            out,
        ]
    };
    assert_eq!(code(&fracwave(&args("a.csv"), dir.path())), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .args(args("b.csv"))
        .env("FRACWAVE_JOBS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("c,w,A,Aprime,d,Bc,gamma,detS0sign,n_neg,n_zero,method\n"));
    assert_eq!(text.lines().count(), 4);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["rows"], 3);
    assert!(summary["critical_speed"].is_null());
}

#[test]
fn oracle_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(
        &[
            "oracle", "--kind", "rbo", "--c", "1.2192", "--n", "512", "--curves", "e.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["sup_diff"].as_f64().unwrap() <= 1e-6);
    assert!(dir.path().join("e.csv").exists());
    let o = fracwave(&["oracle", "--kind", "small-amplitude", "--alpha", "0.75"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let p = v["amplitude_exponent"].as_f64().unwrap();
    assert!((p - 3.0).abs() < 0.2, "{p}");
}

#[test]
fn stability_report_for_archived_wave() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&fracwave(
            &["solve", "--alpha", "2", "--c", "1.2181", "--n", "512", "--out", "w.json"],
            dir.path()
        )),
        0
    );
    let o = fracwave(&["stability", "--input", "w.json", "--n", "512"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n_neg"], 1);
    assert_eq!(v["n_zero"], 1);
    assert!(v["d"].as_f64().unwrap() < 0.0);
}

#[test]
fn validate_subset_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracwave(&["validate", "--only", "10", "--report", "r.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let o = fracwave(&["validate", "--only", "7c"], dir.path());
    assert_eq!(code(&o), 1);
    assert_eq!(code(&fracwave(&["validate", "--only", "99"], dir.path())), 3);
}

//! Integration tests for the command-line interface: schemas, exit codes,
//! and error handling through the real binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_noma-mec")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("exp.conf");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_writes_flat_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 2\nseed = 5\n");
    let out = dir.path().join("solve.out");
    let r = run(&["solve", &cfg, "--solver", "bss", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("format = solve-v1\nstatus = ok\nsolver = bss\nseed = 5\n"));
    for key in ["alpha_star = ", "beta = ", "p = ", "sum_rate_at_opt = ", "total_energy = ", "iterations = ", "trace = "] {
        assert!(text.contains(key), "missing {key} in:\n{text}");
    }
}

#[test]
fn solve_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 2\nseed = 5\n");
    let out = dir.path().join("solve.out");
    let r = run(&["solve", &cfg, "--seed", "11", "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    assert!(fs::read_to_string(&out).unwrap().contains("seed = 11\n"));
}

#[test]
fn closed_form_solver_runs_on_two_users() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 2\nseed = 1\n");
    let out = dir.path().join("solve.out");
    let r = run(&["solve", &cfg, "--solver", "closed2", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("solver = closed2"));
    assert!(text.contains("iterations = 0"));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.out");
    for body in ["bogus_key = 1\n", "M = 0\n", "epsilon = nope\n"] {
        let cfg = write_config(dir.path(), body);
        let r = run(&["solve", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(2), "config {body:?}");
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn missing_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve.out");
    let r = run(&["solve", "/definitely/not/here.conf", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn closed2_on_three_users_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 3\n");
    let out = dir.path().join("solve.out");
    let r = run(&["solve", &cfg, "--solver", "closed2", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn infeasible_scenario_exits_3_with_report() {
    let dir = tempfile::tempdir().unwrap();
    // pure-local energy alone exceeds the budget and there is no power to
    // offload with, so no deadline is achievable
    let cfg = write_config(dir.path(), "M = 2\ne_max_j = 1e-6\np_max_w = 0\n");
    let out = dir.path().join("solve.out");
    let r = run(&["solve", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("status = infeasible"));
}

#[test]
fn sweep_csv_schema_and_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 2\nseed = 3\n");
    let out = dir.path().join("sweep.csv");
    let r = run(&[
        "sweep", &cfg, "--vary", "e_max", "--values", "0.1,0.2", "--solvers", "bss,local",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# schema sweep-v1");
    assert_eq!(lines[1], "value,solver,seed,alpha_star,sum_rate_at_opt,total_energy,iterations");
    assert_eq!(lines.len(), 2 + 4);
    assert!(lines[2].starts_with("0.1,bss,3,"));
}

#[test]
fn sweep_rejects_unknown_axis_and_solver() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 2\n");
    let out = dir.path().join("sweep.csv");
    let r = run(&["sweep", &cfg, "--vary", "bandwidth", "--values", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&[
        "sweep", &cfg, "--vary", "p_max", "--values", "0.01", "--solvers", "newton",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn trace_csv_with_closed_form_reference() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "M = 2\nseed = 2\n");
    let out = dir.path().join("trace.csv");
    let r = run(&["trace", &cfg, "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# schema trace-v1\niteration,lo,hi,mid,feasible\n"));
    assert!(text.contains("# bss alpha_star = "));
    assert!(text.contains("closed2"));
    // every data row has five fields
    for line in text.lines().skip(2).filter(|l| !l.starts_with('#')) {
        assert_eq!(line.split(',').count(), 5, "{line}");
    }
}

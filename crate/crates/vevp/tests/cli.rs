//! Process-level checks of the `vevp` binary: exit codes, output files,
//! and byte-level determinism across separate invocations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vevp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vevp"))
}

fn run(args: &[&str]) -> Output {
    vevp().args(args).output().expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn missing_config_file_exits_4() {
    let out = run(&["simulate", "--config", "/nonexistent/vevp.json"]);
    assert_eq!(out.status.code(), Some(4), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("error"), "stderr: {}", stderr(&out));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{ this is not json");
    let out = run(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"grid": {"m": 3}}"#);
    let out = run(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_override_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "simulate",
        "--out",
        out_dir.to_str().unwrap(),
        "--override",
        "grid.m=3",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn invalid_override_value_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "simulate",
        "--out",
        out_dir.to_str().unwrap(),
        "--override",
        "grid.n=-4",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn steady_check_reports_pass_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "steady.json",
        r#"{
            "grid": {"n": 16},
            "params": {"preset": "nondimensional"},
            "time": {"dt": 0.01}
        }"#,
    );
    let out = run(&["steady-check", "--config", &cfg, "--steps", "50"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("PASS"), "stdout: {}", stdout(&out));
}

#[test]
fn simulate_writes_outputs_and_reports_completion() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "run.json",
        r#"{
            "grid": {"n": 8},
            "params": {"preset": "nondimensional"},
            "init": {"preset": "smooth", "amp": 0.05},
            "time": {"dt": 0.015625, "t_final": 0.125}
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("completed"), "stdout: {}", stdout(&out));
    assert!(out_dir.join("diagnostics.csv").exists());
    assert!(out_dir.join("final.bin").exists());
}

#[test]
fn separate_invocations_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.json",
        r#"{
            "grid": {"n": 8},
            "params": {"preset": "nondimensional"},
            "init": {"preset": "smooth", "amp": 0.05, "perturbation_amp": 1e-3},
            "time": {"dt": 0.015625, "t_final": 0.125}
        }"#,
    );
    let mut outputs = Vec::new();
    for leg in ["a", "b"] {
        let out_dir = dir.path().join(leg);
        let out = run(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            "11",
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        outputs.push((
            fs::read(out_dir.join("diagnostics.csv")).unwrap(),
            fs::read(out_dir.join("final.bin")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "diagnostics differ between invocations");
    assert_eq!(outputs[0].1, outputs[1].1, "final snapshots differ between invocations");
}

#[test]
fn instability1d_writes_rate_table() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "lab.json",
        r#"{"lab1d": {"k_list": [2, 4], "t_final": 0.2, "dt": 0.002}}"#,
    );
    let out = run(&["instability1d", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let table = out_dir.join("instability1d.csv");
    assert!(table.exists());
    let text = fs::read_to_string(&table).unwrap();
    assert!(text.lines().count() >= 3, "expected a header and two rows: {text}");
}

#[test]
fn blow_up_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        "rough.json",
        r#"{
            "grid": {"n": 8},
            "params": {"preset": "nondimensional"},
            "init": {"preset": "smooth", "amp": 1e6},
            "time": {"dt": 100.0, "t_final": 1000.0}
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
}

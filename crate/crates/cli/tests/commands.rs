use std::path::Path;

use deepwave_cli::config::RunConfig;
use deepwave_cli::{run, Command};
use deepwave_core::solver::{export_wave, ConformalWave};

fn small(out: &Path) -> RunConfig {
    let mut cfg = RunConfig {
        out: out.to_path_buf(),
        ..Default::default()
    };
    cfg.physics.c_fraction = 0.95;
    cfg.solver.grid = 512;
    cfg.solver.half_length = 60.0;
    cfg
}

#[test]
fn solve_writes_wave_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let o = run(Command::Solve, &cfg, None, None);
    assert_eq!(o.exit, 0, "{}", o.message);
    assert!(o.message.starts_with("c="));
    assert!(dir.path().join("wave.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("check_name,value,target,abs_tol,rel_tol,status\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["config"]["solver"]["grid"], 512);
}

#[test]
fn speed_above_minimum_is_a_range_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.physics.c_fraction = 1.01;
    let o = run(Command::Solve, &cfg, None, None);
    assert_eq!(o.exit, 2);
    assert!(o.message.contains("E_RANGE"), "{}", o.message);
}

#[test]
fn missing_output_directory_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(&dir.path().join("absent"));
    assert_eq!(run(Command::Solve, &cfg, None, None).exit, 3);
}

#[test]
fn corrupted_wave_file_is_an_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    assert_eq!(run(Command::Solve, &cfg, None, None).exit, 0);
    let path = dir.path().join("wave.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let start = text.find("\"y_samples\"").unwrap() + 16;
    let mut bytes = text.into_bytes();
    let i = (start..bytes.len())
        .find(|&j| (b'1'..=b'8').contains(&bytes[j]))
        .unwrap();
    bytes[i] += 1;
    std::fs::write(&path, bytes).unwrap();
    assert_eq!(run(Command::Verify, &cfg, None, None).exit, 4);
    std::fs::write(&path, b"{not json").unwrap();
    assert_eq!(run(Command::TailFit, &cfg, None, None).exit, 4);
}

#[test]
fn tail_fit_window_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    assert_eq!(run(Command::Solve, &cfg, None, None).exit, 0);
    let o = run(Command::TailFit, &cfg, None, Some((10.0, 90.0)));
    assert_eq!(o.exit, 2, "{}", o.message);
    let o = run(Command::TailFit, &cfg, None, Some((2.0, 20.0)));
    assert!(o.message.contains("tail_exponent"), "{}", o.message);
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(
        summary.contains("oscillatory core"),
        "core-overlap warning missing"
    );
}

#[test]
fn oracle_suite_is_reproducible() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let mut c1 = small(d1.path());
    let mut c2 = small(d2.path());
    c1.seed = 42;
    c2.seed = 42;
    assert_eq!(run(Command::OracleSuite, &c1, None, None).exit, 0);
    assert_eq!(run(Command::OracleSuite, &c2, None, None).exit, 0);
    let a = std::fs::read(d1.path().join("report.csv")).unwrap();
    let b = std::fs::read(d2.path().join("report.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"physics": {"gravity": 1.0}}"#).unwrap();
    let e = RunConfig::load(&path).unwrap_err();
    assert_eq!(e.code(), "E_CONFIG");
}

#[test]
fn trivial_wave_passes_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let params = cfg.physics.params().unwrap();
    let w = ConformalWave::from_samples(params, 200.0, vec![0.0; 256]).unwrap();
    export_wave(&w, &cfg.wave_path()).unwrap();
    let o = run(Command::Verify, &cfg, None, None);
    assert_eq!(o.exit, 0, "{}", o.message);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(
        csv.lines()
            .skip(1)
            .all(|l| l.ends_with(",pass") || l.ends_with(",info")),
        "{csv}"
    );
}

#[test]
fn binary_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_deepwave");
    let out = dir.path().to_str().unwrap();
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap();
    let o = status(&["solve", "--out", out, "--c-fraction", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_RANGE"));
    let o = status(&["oracle-suite", "--out", out, "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("oracle checks passed"));
    let o = status(&["verify", "--out", out, "--wave", "/nonexistent/wave.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = status(&["solve", "--config", "/nonexistent/cfg.json", "--out", out]);
    assert_eq!(o.status.code(), Some(3));
}

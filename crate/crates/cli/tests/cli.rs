use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn uiwd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uiwd"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    fs::write(&p, body).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_three_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = uiwd(&[
        "run",
        "--config",
        fixture("minimal.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["trajectory.csv", "summary.txt", "probes.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 12);
    assert!(csv.starts_with("agent_id,period,wealth_total"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture("shock_sweep.toml");
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let o = uiwd(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "99",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(out);
    }
    for f in ["trajectory.csv", "summary.txt", "probes.json"] {
        assert_eq!(
            fs::read(outputs[0].join(f)).unwrap(),
            fs::read(outputs[1].join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn summary_echoes_defaulted_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "agents = 1\nperiods = 3\nseed = 1\n");
    let out = tmp.path().join("out");
    let o = uiwd(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("default.policy.regret_weight = 1.0"));
    assert!(summary.contains("default.wealth.period_fraction = 1.0"));
    assert!(!summary.contains("default.seed"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "agnts = 3\n");
    let out = tmp.path().join("o");
    let o = uiwd(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("agnts"), "{err}");
    assert!(err.contains("[config]"), "{err}");
}

#[test]
fn invalid_value_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[[shocks]]\nkind = \"layoff\"\ntarget = \"wealth\"\nmagnitude = -2.0\nperiod = 1\n",
    );
    let out = tmp.path().join("o");
    let o = uiwd(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shocks[0].magnitude"), "{}", stderr(&o));
}

#[test]
fn eis_on_short_series_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "periods = 1\n");
    let out = tmp.path().join("o");
    let o = uiwd(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--metrics",
        "eis",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("series too short"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("out");
    let o = uiwd(&[
        "run",
        "--config",
        fixture("minimal.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("[io]"));
}

#[test]
fn missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.toml");
    let o = uiwd(&[
        "probe",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn probe_verb_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let o = uiwd(&[
        "probe",
        "--config",
        fixture("shock_sweep.toml").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("nonmonotonic  PASS"), "{stdout}");
    let json = fs::read_to_string(tmp.path().join("probes.json")).unwrap();
    assert!(json.contains("\"sign_change\""));
    assert!(!tmp.path().join("trajectory.csv").exists());
}

#[test]
fn eis_metric_with_long_series() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = uiwd(&[
        "run",
        "--config",
        fixture("eis_demo.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--metrics",
        "eis,mrijs",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("agent.0.relative_dispersion"));
    assert!(summary.contains("[mrijs]"));
    assert!(!summary.contains("[rates]"));
    assert_eq!(
        fs::read_to_string(out.join("probes.json")).unwrap().trim(),
        "[]"
    );
}

#[test]
fn eis_demo_verb() {
    let tmp = tempfile::tempdir().unwrap();
    let o = uiwd(&["eis-demo", "--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("eis_demo.txt")).unwrap();
    assert!(text.contains("unstable = true"));
    assert!(text.contains("[oracle.gamma_5]"));
}

#[test]
fn unknown_metric_is_rejected_by_the_parser() {
    let o = uiwd(&[
        "run",
        "--config",
        "x",
        "--out",
        "y",
        "--metrics",
        "rates,bogus",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annealdiag")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = bin(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn replay_fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/replay")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn generate_writes_instance_json() {
    let out = ok(&["generate", "--n", "10", "--subsystem-size", "4", "--lambda", "0.3", "--seed", "7"]);
    let v = json(&out);
    assert_eq!(v["n"], 10);
    assert_eq!(v["subsystem"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 15);

    // same flags, same bytes
    let again = ok(&["generate", "--n", "10", "--subsystem-size", "4", "--lambda", "0.3", "--seed", "7"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn landscape_reads_generated_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    ok(&["generate", "--n", "8", "--disorder", "0.5", "--seed", "3", "--out", inst.to_str().unwrap()]);
    let out = ok(&["landscape", "--instance-file", inst.to_str().unwrap(), "--beta", "2.0"]);
    let v = json(&out);
    assert!(v["n_local_minima"].as_u64().unwrap() >= 1);
    assert!(v["global_minimum"]["energy"].is_number());
}

#[test]
fn run_then_figures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("campaign.json");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "backend": "glauber",
            "environment_sizes": [4],
            "lambdas": [0.2, 0.5],
            "seeds": [0],
            "reads": 100,
            "sweeps": 200,
            "beta": {"fixed": 7.219},
            "bootstrap_resamples": 10,
            "sensitivity_sweep": false
        })
        .to_string(),
    )
    .unwrap();
    let out = ok(&["run", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--workers", "2"]);
    let summary = json(&out);
    assert!(summary.is_object());
    let records = std::fs::read_to_string(out_dir.join("records.ndjson")).unwrap();
    assert_eq!(records.lines().count(), 2);

    // nothing left to do on resume
    ok(&["run", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--resume"]);
    assert_eq!(std::fs::read_to_string(out_dir.join("records.ndjson")).unwrap(), records);

    let fig_dir = dir.path().join("figs");
    ok(&["figures", out_dir.to_str().unwrap(), "--figure", "coupling", "--out", fig_dir.to_str().unwrap()]);
    let csv = std::fs::read_to_string(fig_dir.join("coupling.csv")).unwrap();
    assert!(csv.starts_with("lambda,seed,M,"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn diagnose_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("diag");
    let fixtures = replay_fixtures();
    let out = ok(&["diagnose", fixtures.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("memory-retaining-aliased"), "{stderr}");
    let records = std::fs::read_to_string(out_dir.join("records.ndjson")).unwrap();
    assert_eq!(records.lines().count(), 5);
}

#[test]
fn errors_carry_a_kind_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"backend": "glauber", "beta": {"fixed": 1.0}, "bogus": 1}"#).unwrap();
    let out = bin(&["run", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error [config]"));

    let out = bin(&["generate", "--n", "7"]);
    assert!(!out.status.success());
}

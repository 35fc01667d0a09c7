use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kms")).args(args).output().expect("kms binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn propagator_thermal_default_grid() {
    let out = kms(&["propagator", "--mass", "1", "--beta", "2", "--grid", "default"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("u,r,t,re,im,delta"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let delta: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(delta < 1e-8, "{row}");
        assert!(!row.contains(';'));
    }
}

#[test]
fn propagator_without_beta_is_vacuum() {
    let out = kms(&["propagator", "--mass", "1", "--format", "json", "--reproducible"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["beta"].is_null());
    let u: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["u"].as_f64().unwrap()).collect();
    assert!(u.contains(&3.0));
}

#[test]
fn zero_mass_is_a_domain_error() {
    let out = kms(&["propagator", "--mass", "0", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass"));
}

#[test]
fn invalid_tolerance_is_a_domain_error() {
    assert_eq!(kms(&["kms", "thermal-mass", "--tolerance", "-1"]).status.code(), Some(2));
}

#[test]
fn empty_fit_window_is_a_numeric_error() {
    let out = kms(&["cluster", "--mass", "1", "--radii", "4..6:0.5", "--fit-window", "20..30"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn metadata_is_dropped_when_reproducible() {
    let with = json(&kms(&["kms", "thermal-mass", "--mass", "0", "--beta", "1"]));
    assert!(with["metadata"]["version"].is_string());
    assert!(with["metadata"]["elapsed_seconds"].is_number());
    let without = json(&kms(&["kms", "thermal-mass", "--mass", "0", "--beta", "1", "--reproducible"]));
    assert!(without.get("metadata").is_none());
}

#[test]
fn thermal_mass_at_zero_mass() {
    let v = json(&kms(&["kms", "thermal-mass", "--mass", "0", "--beta", "1"]));
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.0 / 12.0).abs() < 1e-9, "{value}");
    assert!((value - 0.0833).abs() < 1e-4);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = config(&dir, "mass = 0.0\nbeta = 2.0\nreproducible = true\n");
    let cfg = path.to_str().unwrap();
    let from_file = json(&kms(&["--config", cfg, "kms", "thermal-mass"]));
    assert_eq!(from_file["mass"].as_f64(), Some(0.0));
    assert_eq!(from_file["beta"].as_f64(), Some(2.0));
    assert!(from_file.get("metadata").is_none());
    let overridden = json(&kms(&["--config", cfg, "kms", "thermal-mass", "--beta", "1"]));
    assert_eq!(overridden["beta"].as_f64(), Some(1.0));
    assert_eq!(overridden["mass"].as_f64(), Some(0.0));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = config(&dir, "masss = 1.0\n");
    let out = kms(&["--config", path.to_str().unwrap(), "kms", "thermal-mass"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = kms(&["verify", "--reproducible", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn golden_outputs_are_reproduced() {
    let cases: [(&[&str], &str); 5] = [
        (&["--config", "propagator_thermal.toml", "propagator", "--reproducible"], "propagator_thermal.csv"),
        (&["--config", "cluster_vacuum.toml", "cluster", "--reproducible"], "cluster_vacuum.json"),
        (&["--config", "correct_delta.toml", "kms", "correct", "--reproducible"], "correct_delta.json"),
        (&["--config", "verify_cocycle.toml", "verify", "--reproducible"], "verify_cocycle.json"),
        (&["verify", "--reproducible"], "verify_corpus.json"),
    ];
    for (args, golden) in cases {
        let args: Vec<String> = args
            .iter()
            .map(|a| if a.ends_with(".toml") { fixture(a).to_string_lossy().into_owned() } else { a.to_string() })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = kms(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(stdout(&out), fs::read_to_string(fixture(golden)).unwrap(), "{golden}");
    }
}

#[test]
fn vacuum_cluster_decays_fast_enough() {
    let out = kms(&["cluster", "--mass", "1", "--n", "1", "--powers", "2,2", "--format", "json", "--reproducible"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["fit"]["rate"].as_f64().unwrap() >= 1.9);
    assert_eq!(v["bound"]["passed"], Value::Bool(true));
}

#[test]
fn negative_control_fails() {
    let out = kms(&["cluster", "--mass", "1", "--negative-control", "--format", "json"]);
    assert_ne!(out.status.code(), Some(0));
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["negative_control"]["passed"], Value::Bool(false));
}

#[test]
fn thermal_cluster_csv_has_one_row_per_radius() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = kms(&[
        "cluster",
        "--mass",
        "1",
        "--beta",
        "1",
        "--n",
        "2",
        "--radii",
        "4..8:0.5",
        "--fit-window",
        "4..8",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("r,r_e,re,im,abs"));
    assert_eq!(text.lines().count() - 1, 9);
    let v: Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["rearrangement"]["passed"], Value::Bool(true));
}

#[test]
fn cluster_argument_mismatch_is_a_domain_error() {
    assert_eq!(kms(&["cluster", "--n", "2", "--powers", "2,2"]).status.code(), Some(2));
}

#[test]
fn correct_emits_sequence_and_limit() {
    let out = kms(&[
        "kms", "correct", "--obs", "phi4", "--int", "phi4", "--order", "1", "--vanhove", "2..4", "--mode", "delta",
        "--tolerance", "1e-7", "--reproducible",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["corrections"].as_array().unwrap().len(), 3);
    assert_eq!(v["van_hove"]["status"], Value::String("converged".into()));
    assert!(v["van_hove"]["limit"].as_f64().unwrap() < 0.0);
}

#[test]
fn correct_rejects_bad_arguments() {
    assert_eq!(kms(&["kms", "correct", "--order", "3"]).status.code(), Some(2));
    assert_eq!(kms(&["kms", "correct", "--obs", "phi3"]).status.code(), Some(0));
    assert_eq!(kms(&["kms", "correct", "--int", "phi3"]).status.code(), Some(2));
    assert_eq!(kms(&["kms", "correct", "--obs", "psi"]).status.code(), Some(2));
}

#[test]
fn reorder_check_passes() {
    let out = kms(&["kms", "check", "reorder", "--mass", "0", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["q2_over_c"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert!((v["q0_over_c2"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn shift_check_reports_through_exit_code() {
    let out = kms(&["kms", "check", "shift", "--index", "2", "--shifts=-0.1,0", "--base-time=-0.15"]);
    let v = json(&out);
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 4 }));
    assert_eq!(v["values"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_default_corpus_passes() {
    let out = kms(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    for id in v["identities"].as_array().unwrap() {
        assert_eq!(id["replayed"], Value::Bool(true), "{}", id["name"]);
    }
}

#[test]
fn verify_single_cocycle_prints_trace() {
    let out = kms(&["verify", "--t", "1/4", "--s", "-1/8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let trace = v["identities"][0]["trace"].as_array().unwrap();
    assert!(trace.first().unwrap().as_str().unwrap().starts_with("start "));
    assert_eq!(trace.last().unwrap().as_str(), Some("end 1"));
}

#[test]
fn verify_with_corrupted_rules_fails() {
    let out = kms(&["verify", "--corrupt-rules"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["passed"], Value::Bool(false));
}

#[test]
fn verify_needs_both_times() {
    assert_eq!(kms(&["verify", "--t", "1/4"]).status.code(), Some(2));
    assert_eq!(kms(&["verify", "--t", "x", "--s", "1"]).status.code(), Some(2));
}

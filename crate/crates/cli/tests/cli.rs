use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ergodix(args: &[&str], config: &str, out: &Path) -> Output {
    let dir = out.join("config.json");
    fs::write(&dir, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ergodix"))
        .args(args)
        .arg("--config")
        .arg(&dir)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn folner_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    let out = ergodix(&["folner"], r#"{"windows": {"n_min": 1, "n_max": 5, "q": 1}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("folner.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    let v = read_json(&tmp.path().join("folner.json"));
    assert_eq!(v["schema"], "ergodix/1");
    assert_eq!(v["subcommand"], "folner");
    assert_eq!(v["passed"], true);
}

#[test]
fn custom_output_names() {
    let tmp = TempDir::new().unwrap();
    let config = r#"{"windows": {"n_min": 1, "n_max": 2, "q": 1}, "outputs": {"csv": "a.csv", "json": "b.json"}}"#;
    let out = ergodix(&["folner"], config, tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("a.csv").exists());
    assert!(tmp.path().join("b.json").exists());
}

#[test]
fn unknown_keys_are_config_errors() {
    let tmp = TempDir::new().unwrap();
    let out = ergodix(&["folner"], r#"{"windows": {"n_min": 1, "n_max": 2, "q": 1}, "window": 3}"#, tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out =
        ergodix(&["folner"], r#"{"windows": {"n_min": 1, "n_max": 2, "q": 1}, "params": {"shfit": [1]}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_schema_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let out =
        ergodix(&["folner"], r#"{"schema": "ergodix/0", "windows": {"n_min": 1, "n_max": 2, "q": 1}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}

#[test]
fn missing_config_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ergodix"))
        .args(["folner", "--config"])
        .arg(tmp.path().join("absent.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn randomized_runs_need_a_seed() {
    let tmp = TempDir::new().unwrap();
    let out = ergodix(&["invariants"], r#"{"params": {"suites": ["folner"], "trials": 2}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = ergodix(&["invariants", "--seed", "7"], r#"{"params": {"suites": ["folner"], "trials": 2}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_suite_is_config_error() {
    let tmp = TempDir::new().unwrap();
    let out = ergodix(&["invariants"], r#"{"seed": 1, "params": {"suites": ["nope"]}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_expectation_exits_one_with_failures_file() {
    let tmp = TempDir::new().unwrap();
    let config = r#"{
        "system": {"kind": "rotation", "p": 1, "Q": 5},
        "observables": {"v": {"kind": "named", "name": "V"}, "w": {"kind": "adjoint", "of": {"kind": "named", "name": "V"}}},
        "windows": {"n_min": 1, "n_max": 20},
        "params": {"statistic": "weak_mixing", "a": "w", "b": "v", "expect": "decaying"}
    }"#;
    let out = ergodix(&["mix"], config, tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let v = read_json(&tmp.path().join("failures.json"));
    assert_eq!(v["subcommand"], "mix");
    assert!(!v["failures"].as_array().unwrap().is_empty());
    assert!(tmp.path().join("mix.json").exists());
}

#[test]
fn split_rejects_quasi_local_systems() {
    let tmp = TempDir::new().unwrap();
    let out = ergodix(&["split"], r#"{"system": {"kind": "shift", "q": 1, "d": 2}}"#, tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_positive_observable_is_rejected_by_driver() {
    let tmp = TempDir::new().unwrap();
    let config = r#"{
        "system": {"kind": "shift", "q": 1, "d": 2},
        "observables": {"z": {"kind": "pauli", "sites": [[0]], "letters": "Z"}},
        "windows": {"n_min": 1, "n_max": 3},
        "params": {"observable": "z", "exponents": [1, 2]}
    }"#;
    let out = ergodix(&["szemeredi"], config, tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

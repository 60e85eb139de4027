use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chaoslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaoslab"))
        .args(args)
        .env("CHAOSLAB_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn constants_at_half_gives_sigma_two() {
    let out = chaoslab(&["constants", "--q", "2", "--H", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let s = v["results"]["sigma_sq"].as_f64().unwrap();
    assert!((s - 2.0).abs() < 1e-12, "{s}");
    assert_eq!(v["config"]["H"], 0.5);
}

#[test]
fn identities_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = chaoslab(&["identities", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(dir.path());
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
    assert!(dir.path().join("samples.csv").exists());
}

#[test]
fn decomposition_columns_sum_to_statistic() {
    let dir = tempfile::tempdir().unwrap();
    let out = chaoslab(&[
        "variation", "--q", "3", "--H", "0.3", "--n", "128", "--m", "20", "--weight", "poly:1,0.5,-0.25,0.1",
        "--decompose", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let g_col = header.iter().position(|h| *h == "g_n").unwrap();
    let main = header.iter().position(|h| *h == "main").unwrap();
    let resid = header.iter().position(|h| *h == "residual").unwrap();
    let mut rows = 0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let parts: f64 = cells[main..resid].iter().sum();
        assert!((parts - cells[g_col]).abs() <= 1e-8 * (1.0 + cells[g_col].abs()), "{line}");
        rows += 1;
    }
    assert_eq!(rows, 20);
}

#[test]
fn repeated_runs_are_identical_apart_from_meta() {
    let args = ["fbm", "--H", "0.3", "--n", "256", "--m", "200", "--seed", "11"];
    let strip = |out: Output| {
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("meta");
        v.to_string()
    };
    let a = strip(chaoslab(&args));
    let b = Command::new(env!("CARGO_BIN_EXE_chaoslab"))
        .args(args)
        .env("CHAOSLAB_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a, strip(b));
}

#[test]
fn exported_paths_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = chaoslab(&[
        "fbm", "--H", "0.4", "--n", "64", "--m", "5", "--export-paths", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
    let file = chaoslab::fbm::read_paths(fs::File::open(dir.path().join("paths.fbm")).unwrap()).unwrap();
    assert_eq!((file.m, file.n), (5, 64));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"q": 2, "H": 0.2, "seed": 3}"#).unwrap();
    let out = chaoslab(&["constants", "--config", cfg.to_str().unwrap(), "--H", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["H"], 0.5);
    assert_eq!(v["config"]["seed"], 3);
}

#[test]
fn invalid_configuration_exits_two() {
    for args in [
        vec!["variation", "--H", "1.5"],
        vec!["variation", "--q", "0"],
        vec!["constants", "--weight", "sin:1"],
        vec!["fbm", "--method", "cholesky", "--n", "100000"],
    ] {
        let out = chaoslab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"q": 2, "hurst": 0.3}"#).unwrap();
    let out = chaoslab(&["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

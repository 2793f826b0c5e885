use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn params(name: &str) -> String {
    root().join("params").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sixvertex"))
        .args(args)
        .env_remove("SIXVERTEX_PARALLELISM")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn verify_l1_passes() {
    let out = run(&["verify", "--params", &params("l1.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["pass"], true);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() > 20);
    for c in checks {
        for key in ["name", "anchor", "residual", "tol", "pass"] {
            assert!(c.get(key).is_some(), "row without {key}: {c}");
        }
    }
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn compute_z_matches_golden_corpus() {
    let text = std::fs::read_to_string(root().join("data/golden.json")).unwrap();
    let corpus: Vec<Value> = serde_json::from_str(&text).unwrap();
    let record = corpus.iter().find(|r| r["L"] == 2).unwrap();
    let out = run(&["compute-z", "--params", &params("l2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let (re, im) = complex(&json(&out)["Z"]);
    let (gre, gim) = complex(&record["Z"]);
    let gap = (re - gre).hypot(im - gim) / gre.hypot(gim);
    assert!(gap <= 1e-13, "{gap:e}");
    assert!(record["crosscheck_discrepancy"].as_f64().unwrap() < 1e-10);
}

#[test]
fn golden_record_round_trips() {
    let out = run(&["compute-z", "--golden", "--params", &params("l1.json")]);
    assert_eq!(out.status.code(), Some(0));
    let record = json(&out);
    assert_eq!(record["L"], 1);
    assert!(record["crosscheck_discrepancy"].as_f64().unwrap() < 1e-10);
}

#[test]
fn mu_length_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"L":2,"gamma":[0.3,0.1],"h":[0.5,0.2],"mu":[[0.1,0.2]],"lambda":[[0.4,0.3],[0.1,0.2]]}"#,
    )
    .unwrap();
    let out = run(&["verify", "--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`mu`"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"L\": 1,\n  \"gamma\": [0.3,\n").unwrap();
    let out = run(&["verify", "--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn missing_params_and_bad_override_exit_2() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    let out = run(&["verify", "--params", &params("l1.json"), "--tol", "no_such_check=1e-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tight_override_fails_the_check() {
    let out = run(&["verify", "--params", &params("l1.json"), "--tol", "leading_coefficient=1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["pass"], false);
    let row = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "leading_coefficient").unwrap();
    assert_eq!(row["pass"], false);
    // serde_json's default float parser is not correctly rounded
    assert!((row["tol"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12);
}

#[test]
fn reports_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for threads in ["1", "8"] {
        let path = dir.path().join(format!("report-{threads}.json"));
        let out = run(&[
            "verify",
            "--params",
            &params("l2.json"),
            "--seed",
            "5",
            "--parallelism",
            threads,
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        bytes.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn seed_enters_the_hash() {
    let hash = |seed: &str| json(&run(&["compute-z", "--params", &params("l1.json"), "--seed", seed]))["config_hash"].clone();
    assert_eq!(hash("3"), hash("3"));
    assert_ne!(hash("3"), hash("4"));
}

#[test]
fn sweep_writes_one_row_per_step() {
    let out = run(&[
        "sweep",
        "--params",
        &params("l1.json"),
        "--vary",
        "gamma.re",
        "--from",
        "0.2",
        "--to",
        "0.4",
        "--steps",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "gamma.re");
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.2);
    assert_eq!(rows[1][0].parse::<f64>().unwrap(), 0.4);
    assert!(rows.iter().all(|r| r.len() == header.len()));
}

#[test]
fn interpolate_exports_the_tensor() {
    let out = run(&["interpolate", "--params", &params("l2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let poly = json(&out);
    assert_eq!(poly["L"], 2);
    assert_eq!(poly["degree"], 4);
    let rows = poly["coeffs"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 5));
}

#[test]
fn homog_limit_converges() {
    let out = run(&["homog-limit", "--params", &params("l2.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out).to_string().contains("samples"));
}

//! End-to-end runs of the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_basketstats"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout_of(output: &Output) -> &str {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    std::str::from_utf8(&output.stdout).unwrap()
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_str(stdout_of(output)).unwrap()
}

#[test]
fn se_vanilla_matches_hand_value() {
    // Basket values [1, 2, 3]: s^2 = 1, SE = sqrt(1/3).
    let out = bin()
        .args(["se", "--metric", "abv", "--method", "vanilla"])
        .arg("--input")
        .arg(fixture("three_txns.csv"))
        .output()
        .unwrap();
    let value = json_of(&out);
    let se = value["se"].as_f64().unwrap();
    assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-12, "se = {se}");
    assert_eq!(value["method"], "vanilla");
}

#[test]
fn coverage_example_value() {
    let out = bin()
        .args(["coverage", "--multiple", "2", "--nominal", "0.95"])
        .output()
        .unwrap();
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("multiple,nominal,coverage"));
    let row = lines.next().unwrap();
    let coverage: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((coverage - 0.673).abs() < 5e-4, "coverage = {coverage}");
}

#[test]
fn power_curve_decays_along_multiples() {
    let out = bin()
        .args([
            "power",
            "--alpha",
            "0.05",
            "--theta-over-se",
            "2.8",
            "--multiples",
            "1,2,3,4",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    let rows = json_of(&out);
    let powers: Vec<f64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["power"].as_f64().unwrap())
        .collect();
    assert_eq!(powers.len(), 4);
    assert!(powers[0] > 0.79 && powers[0] < 0.81);
    assert!(powers.windows(2).all(|w| w[1] < w[0]), "{powers:?}");
}

#[test]
fn delta_rejects_asp() {
    let out = bin()
        .args(["se", "--metric", "asp", "--method", "delta"])
        .arg("--input")
        .arg(fixture("three_txns.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("asp"), "stderr: {err}");
    assert!(err.lines().count() == 1, "one-line diagnostic, got: {err}");
}

#[test]
fn bootstrap_without_seed_fails() {
    let out = bin()
        .args(["se", "--metric", "abv", "--method", "boot1"])
        .arg("--input")
        .arg(fixture("three_txns.csv"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--seed"), "stderr: {err}");
}

#[test]
fn ingest_generic_writes_csv_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let normalized = dir.path().join("normalized.csv");
    let out = bin()
        .args(["ingest", "--adapter", "generic"])
        .arg("--input")
        .arg(fixture("three_txns.csv"))
        .arg("--output")
        .arg(&normalized)
        .output()
        .unwrap();
    let report = json_of(&out);
    assert_eq!(report["rows_read"], 3);
    assert_eq!(report["rows_kept"], 3);
    assert_eq!(report["summary"]["users"], 3);

    let written = std::fs::read_to_string(&normalized).unwrap();
    let original = std::fs::read_to_string(fixture("three_txns.csv")).unwrap();
    assert_eq!(written, original, "fixture is already canonical");

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("normalized.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "ingest");
    assert_eq!(manifest["params"]["adapter"], "generic");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

fn write_synth_config(dir: &Path) -> PathBuf {
    let path = dir.join("synth.json");
    std::fs::write(&path, r#"{"users": 120, "rho": 0.5, "seed": 5}"#).unwrap();
    path
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_synth_config(dir.path());
    let data = dir.path().join("ds.csv");
    let status = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(&data)
        .status()
        .unwrap();
    assert!(status.success());

    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = bin()
            .args(["se", "--metric", "abv", "--method", "boot1", "--b", "200", "--seed", "11"])
            .arg("--input")
            .arg(&data)
            .arg("--output")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&out).unwrap()
    };
    let first = run("se1.json");
    let second = run("se2.json");
    assert_eq!(first, second);
    assert!(!first.is_empty());
}

#[test]
fn thread_cap_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_synth_config(dir.path());
    let data = dir.path().join("ds.csv");
    assert!(bin()
        .arg("simulate")
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(&data)
        .status()
        .unwrap()
        .success());

    let run = |threads: &str| {
        let out = bin()
            .args(["trajectory", "--metric", "abv", "--points", "3"])
            .args(["--b", "100", "--seed", "21", "--threads", threads])
            .arg("--input")
            .arg(&data)
            .output()
            .unwrap();
        stdout_of(&out).to_owned()
    };
    let single = run("1");
    let pooled = run("4");
    assert_eq!(single, pooled);
    assert!(single.starts_with("fraction,vanilla_se,boot_se,ratio,ratio_lo,ratio_hi,method,B,seed"));
}

#[test]
fn aa_harness_reports_each_method() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_synth_config(dir.path());
    let out = bin()
        .arg("aa")
        .arg("--config")
        .arg(&config)
        .args(["--reps", "100", "--b", "50", "--methods", "vanilla,boot1"])
        .output()
        .unwrap();
    let result = json_of(&out);
    assert_eq!(result["kind"], "aa");
    assert_eq!(result["replications"], 100);
    let outcomes = result["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 2);
    assert_eq!(outcomes[0]["method"], "vanilla");
    assert_eq!(outcomes[1]["method"], "bootstrap-one-way");
    for outcome in outcomes {
        let rate = outcome["rate"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&rate));
    }
}

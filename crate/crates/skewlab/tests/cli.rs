//! End-to-end checks of the command-line interface through the built binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use skewlab::dataset::synthetic_crabs;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewlab"))
}

fn write_mini_dataset(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    // Two columns keep every CLI fit bivariate and quick.
    let full = synthetic_crabs(11);
    let data_path = dir.join("mini.csv");
    let mut lines = vec!["fl,cw,label".to_string()];
    for i in 0..full.n() {
        lines.push(format!(
            "{:.5},{:.5},{}",
            full.values[(i, 0)],
            full.values[(i, 3)],
            full.labels[i]
        ));
    }
    fs::write(&data_path, lines.join("\n") + "\n").unwrap();
    let schema_path = dir.join("mini.json");
    fs::write(
        &schema_path,
        r#"{"name": "mini", "continuous": ["fl", "cw"], "label": "label"}"#,
    )
    .unwrap();
    (data_path, schema_path)
}

#[test]
fn fit_prints_record_json() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = write_mini_dataset(dir.path());
    let out = bin()
        .args([
            "fit",
            "--data",
            data.to_str().unwrap(),
            "--columns",
            "fl,cw",
            "--family",
            "csn",
            "--g",
            "2",
            "--seed",
            "1",
            "--max-iter",
            "10",
            "--mstep-max-iter",
            "25",
            "--standardize",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["family"], "csn");
    assert_eq!(record["g"], 2);
    assert_eq!(record["weights"].as_array().unwrap().len(), 2);
    assert_eq!(record["labels"].as_array().unwrap().len(), 200);
    assert!(record["loglik"].as_f64().unwrap().is_finite());
}

#[test]
fn fit_rejects_unknown_column_with_validation_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = write_mini_dataset(dir.path());
    let out = bin()
        .args([
            "fit",
            "--data",
            data.to_str().unwrap(),
            "--columns",
            "nope",
            "--family",
            "csn",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn bench_emits_reports_and_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let (data, schema) = write_mini_dataset(dir.path());
    let out_dir = dir.path().join("runs");
    let out = bin()
        .args([
            "bench",
            "--data",
            data.to_str().unwrap(),
            "--schema",
            schema.to_str().unwrap(),
            "--sizes",
            "2",
            "--seeds",
            "1",
            "--max-iter",
            "8",
            "--mstep-max-iter",
            "20",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let code = out.status.code();
    assert!(
        code == Some(0) || code == Some(3),
        "unexpected exit {code:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reports = fs::read_to_string(out_dir.join("reports.jsonl")).unwrap();
    let lines: Vec<&str> = reports.lines().collect();
    // One subset, one seed, two families.
    assert_eq!(lines.len(), 2);
    for line in lines {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["dataset"], "mini");
        assert_eq!(r["standardized"], true);
    }
    assert!(out_dir.join("figure1_scatter.csv").exists());
    assert!(out_dir.join("table1_ratios.csv").exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("wins"), "stdout: {stdout}");
}

#[test]
fn ari_subcommand_matches_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.txt");
    let truth = dir.path().join("truth.txt");
    fs::write(&pred, "1\n1\n2\n2\n2\n").unwrap();
    fs::write(&truth, "1\n1\n1\n2\n2\n").unwrap();
    let out = bin()
        .args([
            "ari",
            "--pred",
            pred.to_str().unwrap(),
            "--truth",
            truth.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - 1.0 / 6.0).abs() < 1e-6, "ARI {v}");
}

#[test]
fn mardia_max_reports_scalar_supremum() {
    let out = bin()
        .args(["mardia-max", "--d", "1", "--which", "skewness"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let res: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = res["max_value"].as_f64().unwrap();
    // Scalar slant cannot exceed the classical skewness bound and the
    // search should get within a hair of it.
    let sup = 2.0 * (4.0 - std::f64::consts::PI).powi(2) / (std::f64::consts::PI - 2.0).powi(3);
    assert!((v - sup).abs() < 1e-3, "value {v} vs supremum {sup}");
    assert_eq!(res["d"], 1);
}

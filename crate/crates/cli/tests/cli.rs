use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const REFERENCE: &str = include_str!("../../core/presets/reference.json");

fn eomech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eomech"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, edits: &[(&str, Value)]) -> String {
    let mut v: Value = serde_json::from_str(REFERENCE).unwrap();
    for (k, x) in edits {
        v[*k] = x.clone();
    }
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn point_reports_a_stable_reference_branch() {
    let out = eomech(&["point"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let branches = v["branches"].as_array().unwrap();
    assert!(!branches.is_empty());
    assert!(branches.iter().any(|b| b["stable"] == Value::Bool(true)));
}

#[test]
fn malformed_config_names_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"mass_kg\": 5e-12,\n  \"kappa_hz\": ,\n}").unwrap();
    let out = eomech(&["--config", path.to_str().unwrap(), "point"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn out_of_range_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "neg.json", &[("mass_kg", Value::from(-1.0))]);
    let out = eomech(&["--config", &cfg, "point"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("mass"), "{}", stderr(&out));
}

#[test]
fn unstable_point_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "blue.json",
        &[
            ("delta0c_hz", Value::from(-1e7)),
            ("power_optical_w", Value::from(1e-3)),
        ],
    );
    assert_eq!(code(&eomech(&["--config", &cfg, "point"])), 3);
    assert_eq!(code(&eomech(&["--config", &cfg, "stability"])), 3);
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = eomech(&["sweep", "--preset", "fig99"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("fig99"));
}

#[test]
fn axis_sweep_writes_one_row_per_point() {
    let out = eomech(&["sweep", "--axis", "delta0w:-2e8:2e8:101"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 102);
    let col = rows[0].iter().position(|c| c == "delta0w_rad_s").unwrap();
    assert_eq!(rows[1][col].parse::<f64>().unwrap(), -2e8);
    assert_eq!(rows[101][col].parse::<f64>().unwrap(), 2e8);
}

#[test]
fn preset_ratio_override_applies_to_every_panel() {
    let out = eomech(&["sweep", "--preset", "fig3", "--g2-ratio", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let col = rows[0].iter().position(|c| c == "g2_over_g1").unwrap();
    assert!(rows.len() > 1);
    assert!(rows[1..]
        .iter()
        .all(|r| r[col].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn zero_length_dynamics_is_the_initial_state() {
    let out = eomech(&["dynamics", "--t-end", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    let value = |name: &str| {
        let k = rows[0].iter().position(|c| c == name).unwrap();
        rows[1][k].parse::<f64>().unwrap()
    };
    assert_eq!(value("t"), 0.0);
    assert_eq!(value("q"), 0.0);
    assert_eq!(value("q2"), 1.0);
}

#[test]
fn file_output_gets_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "ref.json", &[]);
    let out_path = dir.path().join("point.json");
    let out = eomech(&[
        "--config",
        &cfg,
        "--out",
        out_path.to_str().unwrap(),
        "point",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest: Value = serde_json::from_slice(
        &std::fs::read(dir.path().join("point.json.manifest.json")).unwrap(),
    )
    .unwrap();
    let digest = hex::encode(Sha256::digest(std::fs::read(&cfg).unwrap()));
    assert_eq!(manifest["config_sha256"], Value::from(digest));
    assert_eq!(manifest["command"], Value::from("point"));
    assert_eq!(
        manifest["tool_version"],
        Value::from(env!("CARGO_PKG_VERSION"))
    );
    assert!(manifest["timestamp"]
        .as_str()
        .is_some_and(|t| t.ends_with('Z')));
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out.csv");
    let out = eomech(&["--out", target.to_str().unwrap(), "stability"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn missing_config_exits_four() {
    let out = eomech(&["--config", "/nonexistent/eomech.json", "point"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn json_and_csv_carry_the_same_rows() {
    let csv = eomech(&["--format", "csv", "stability"]);
    let json = eomech(&["--format", "json", "stability"]);
    assert_eq!(code(&csv), 0);
    let rows = csv_rows(&String::from_utf8(csv.stdout).unwrap());
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    let objs = v.as_array().unwrap();
    assert_eq!(objs.len(), rows.len() - 1);
    for (obj, row) in objs.iter().zip(&rows[1..]) {
        for (name, cell) in rows[0].iter().zip(row) {
            if let Some(x) = obj[name].as_f64() {
                assert_eq!(cell.parse::<f64>().unwrap(), x, "{name}");
            }
        }
    }
}

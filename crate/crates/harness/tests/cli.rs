use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_padic-roots"))
}

fn json(args: &[&str]) -> Value {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("padic-roots-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn catalog_lists_seven_quadratics_at_2() {
    let v = json(&["catalog", "--p", "2", "--degree", "2"]);
    assert_eq!(v["fields"].as_array().unwrap().len(), 7);
    assert!(v["mass"]
        .as_array()
        .unwrap()
        .iter()
        .all(|m| m["ok"] == true));
}

#[test]
fn density_integrate_is_rational() {
    let v = json(&[
        "density",
        "integrate",
        "--p",
        "2",
        "--ext",
        "2.2.0.1",
        "--n",
        "2",
    ]);
    assert!(v["exact"]["num"].is_string() && v["exact"]["den"].is_string());
    let v = json(&["density", "integrate", "--p", "3", "--n", "2", "--f2"]);
    assert!(v["f2_mass"]["den"].is_string());
}

#[test]
fn density_eval_at_one_half() {
    let v = json(&["density", "eval", "--p", "2", "--n", "2", "--x", "1/2"]);
    assert_eq!(v["value"]["kind"], "exact");
    assert_eq!(v["value"]["value"]["num"], "1");
    assert_eq!(v["value"]["value"]["den"], "6");
}

#[test]
fn asymptotics_with_bracket() {
    let v = json(&["asymptotics", "--q", "5", "--r", "3", "--n", "4"]);
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    assert!(v["unramified_bracket"]["lo"]["num"].is_string());
}

#[test]
fn roots_of_x2_minus_1() {
    let v = json(&["roots", "--p", "3", "--coeffs", "-1,0,1"]);
    assert_eq!(v["count"], 2);
}

#[test]
fn bad_field_is_an_error() {
    let out = bin()
        .args(["roots", "--p", "3", "--ext", "nope", "--coeffs", "1,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_then_report() {
    let dir = scratch("sim");
    let report = dir.join("report.json");
    let status = bin()
        .args([
            "simulate",
            "--p",
            "3",
            "--n",
            "2",
            "--samples",
            "2000",
            "--seed",
            "11",
            "--workers",
            "1",
        ])
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["metadata"]["seed"], 11);

    let csv_dir = dir.join("csv");
    let status = bin()
        .arg("report")
        .arg("--input")
        .arg(&report)
        .arg("--out-dir")
        .arg(&csv_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(csv_dir.join("pairs_n2.csv")).unwrap();
    assert!(text.lines().take(3).all(|l| l.starts_with('#')));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simulate_from_toml() {
    let dir = scratch("toml");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "p = 5\ndegrees = [1]\nsamples = 500\nseed = 3\n").unwrap();
    let out = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["metadata"]["p"], 5);
    assert_eq!(v["metadata"]["samples"], 500);
    std::fs::remove_dir_all(&dir).unwrap();
}

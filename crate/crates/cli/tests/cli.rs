use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const F2: &str = r#"{"type":"free","rank":2}"#;
const Z2_Z4: &str = r#"{"type":"free_product","factors":[{"type":"cyclic","order":2},{"type":"cyclic","order":4}]}"#;

fn grouplab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouplab"))
        .args(args)
        .env("GROUPLAB_OUT", out)
        .output()
        .expect("run grouplab")
}

fn rate_v(report: &serde_json::Value) -> f64 {
    let t = report["tables"].as_array().unwrap().iter().find(|t| t["name"] == "rate").unwrap();
    t["rows"][0][0].as_f64().unwrap()
}

#[test]
fn growth_writes_v() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zp2_star_zp4.json");
    fs::write(&cfg, Z2_Z4).unwrap();
    let out = grouplab(dir.path(), &["growth", "--group", cfg.to_str().unwrap(), "--format", "json,csv,svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("growth.json")).unwrap()).unwrap();
    assert!((rate_v(&report) - 0.4812118).abs() < 1e-7);
    let csv = fs::read_to_string(dir.path().join("growth-spheres.csv")).unwrap();
    assert!(csv.lines().nth(5).unwrap().starts_with("4,13,"));
    assert!(dir.path().join("growth-spheres-ball.svg").exists());
    assert!(dir.path().join("growth-spheres-log_rate.svg").exists());
}

#[test]
fn walk_is_seeded_and_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["walk", "--group", F2, "--measure", r#"{"builder":"srw"}"#, "--seed", "7", "--horizon", "2000", "--replicas", "500", "--format", "json,csv"];
    assert!(grouplab(a.path(), &args).status.success());
    assert!(grouplab(b.path(), &args).status.success());
    for name in ["walk.json", "walk-drift.csv", "walk-summary.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let report = grouplab::report::ExperimentReport::from_json(&fs::read_to_string(a.path().join("walk.json")).unwrap()).unwrap();
    assert_eq!(report.seed, Some(7));
    let drift = report.table("summary").unwrap().column("drift").unwrap()[0].unwrap();
    assert!((drift - 0.5).abs() < 0.01);
}

#[test]
fn out_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = grouplab(env_dir.path(), &["enumerate", "--group", F2, "--nmax", "2", "--out", flag_dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(flag_dir.path().join("enumerate.json").exists());
    assert!(!env_dir.path().join("enumerate.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = grouplab(dir.path(), &["growth", "--group", "/nonexistent/group.json"]);
    assert_eq!(missing.status.code(), Some(3));
    let bad = grouplab(dir.path(), &["growth", "--group", r#"{"type":"free","rank":"two"}"#]);
    assert_eq!(bad.status.code(), Some(3));
    let no_group = grouplab(dir.path(), &["walk"]);
    assert_eq!(no_group.status.code(), Some(3));
    let budget = grouplab(dir.path(), &["entropy", "--group", F2, "--nmax", "8", "--cap", "100"]);
    assert_eq!(budget.status.code(), Some(2));
    let failing = grouplab(dir.path(), &["suite", "--only", "3"]);
    assert_eq!(failing.status.code(), Some(4));
    let passing = grouplab(dir.path(), &["suite", "--only", "6,7"]);
    assert_eq!(passing.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&passing.stdout).contains("PASS  6"));
}

#[test]
fn census_and_degenerate_tables() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = r#"{"type":"integer_kernel","images":{"a":1,"b":1}}"#;
    let out = grouplab(dir.path(), &["census", "--group", F2, "--subgroup", kernel, "--nmax", "10", "--qc-eps", "0.5", "--qc-m", "2", "--format", "csv,svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("census-census.csv")).unwrap();
    assert!(csv.lines().nth(3).unwrap().starts_with("2,4,"));
    assert!(dir.path().join("census-qc-density.svg").exists());

    let out = grouplab(dir.path(), &["degenerate", "--mode", "scan", "--eps", "0.4,0.1"]);
    assert!(out.status.success());
    let report = grouplab::report::ExperimentReport::from_json(&fs::read_to_string(dir.path().join("degenerate-scan.json")).unwrap()).unwrap();
    let ratios = report.table("scan").unwrap().column("ratio").unwrap();
    assert!((ratios[0].unwrap() - 1.0921).abs() < 5e-4);

    let limit = grouplab(dir.path(), &["degenerate", "--mode", "limit"]);
    assert_eq!(limit.status.code(), Some(3));
}

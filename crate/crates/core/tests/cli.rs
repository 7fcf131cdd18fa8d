use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn projlens(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projlens")).args(args).current_dir(dir).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&projlens(dir.path(), &[])), 1);
    assert_eq!(code(&projlens(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&projlens(dir.path(), &["gen", "--shape", "simplex"])), 1);
    assert_eq!(code(&projlens(dir.path(), &["--help"])), 0);
    assert_eq!(code(&projlens(dir.path(), &["bounds", "--help"])), 0);
}

#[test]
fn parameter_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&projlens(dir.path(), &["gen", "--shape", "simplex", "--dim", "0", "--out", "x.csv"])), 1);
    assert_eq!(code(&projlens(dir.path(), &["bounds", "--eps", "1.5", "--d", "2", "--D", "100", "--sigma-eps", "1", "--lambda-max", "1", "--lambda-avg", "1"])), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "1,2\n3,oops\n").unwrap();
    let out = projlens(dir.path(), &["project", "--in", "bad.csv", "--d", "1", "--out", "p.csv"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&projlens(dir.path(), &["project", "--in", "missing.csv", "--d", "1", "--out", "p.csv"])), 2);
    fs::write(dir.path().join("blocker"), "").unwrap();
    assert_eq!(code(&projlens(dir.path(), &["experiment", "figure4", "--D", "50", "--n-balls", "100", "--out", "blocker/sub"])), 2);
}

#[test]
fn gen_simplex_lists_every_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let out = projlens(dir.path(), &["gen", "--shape", "simplex", "--dim", "1000", "--out", "s.csv"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("x1,x2,"));
    assert_eq!(lines.clone().count(), 1001);
    assert_eq!(lines.next().unwrap().split(',').count(), 1000);
    let summary = stdout_json(&out);
    assert_eq!(summary["n"], 1001);
    assert_eq!(summary["atom_count"], 1);
}

#[test]
fn project_writes_map_sidecar_and_pca_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&projlens(dir.path(), &["gen", "--shape", "twocluster", "--dim", "30", "--n", "400", "--out", "t.csv"])), 0);
    let out = projlens(dir.path(), &["project", "--in", "t.csv", "--d", "2", "--seed", "4", "--out", "r.csv"]);
    assert_eq!(code(&out), 0);
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.csv.map.json")).unwrap()).unwrap();
    assert_eq!(sidecar["mode"], "random");
    assert_eq!(sidecar["seed"], 4);
    let out = projlens(dir.path(), &["project", "--in", "t.csv", "--d", "1", "--mode", "pca", "--out", "p.csv"]);
    let summary = stdout_json(&out);
    assert!(summary["dip_first_coordinate"].as_f64().unwrap() > 0.1);
    assert_eq!(summary["eigenvalues"].as_array().unwrap().len(), 1);
}

#[test]
fn net_estimator_refuses_high_d() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&projlens(dir.path(), &["gen", "--shape", "crosspolytope", "--dim", "10", "--out", "c.csv"])), 0);
    let out = projlens(dir.path(), &["discrepancy", "--in", "c.csv", "--d", "4", "--estimator", "net"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mc"));
}

#[test]
fn discrepancy_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&projlens(dir.path(), &["gen", "--shape", "cube", "--dim", "8", "--out", "c.csv"])), 0);
    let out = projlens(dir.path(), &["discrepancy", "--in", "c.csv", "--d", "2", "--estimator", "mc", "--n-balls", "500"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["estimator"], "mc");
    let v = report["value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&v));
    assert_eq!(report["n_points"], 256);
    assert!(report["witness"]["center"].is_array());
}

#[test]
fn figure4_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = projlens(dir.path(), &["experiment", "figure4", "--D", "200", "--n-balls", "500", "--seed", "2", "--out", "f4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> =
        fs::read_dir(dir.path().join("f4")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.len(), 3, "{names:?}");
    let summary_name = names.iter().find(|n| n.ends_with(".json")).unwrap();
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("f4").join(summary_name)).unwrap()).unwrap();
    for key in ["name", "seeds", "git_describe_or_version", "command", "params", "metrics"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert_eq!(summary["name"], "figure4");
    assert!(summary["command"].as_str().unwrap().contains("--seed 2"));
    let labels = [&summary["metrics"]["set_a"], &summary["metrics"]["set_b"]];
    assert!(labels.contains(&&Value::from("projected_simplex")));
    assert!(labels.contains(&&Value::from("gaussian_sample")));
}

#[test]
fn bounds_from_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&projlens(dir.path(), &["gen", "--shape", "simplex", "--dim", "100", "--out", "s.csv"])), 0);
    let out = projlens(dir.path(), &["bounds", "--eps", "0.2", "--d", "2", "--D", "100", "--in", "s.csv"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert!((report["eccentricity"]["ecc"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{report}");
}

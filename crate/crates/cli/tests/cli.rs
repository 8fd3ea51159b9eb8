use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repo(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(path)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiral-winding")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn validate_reports_the_trig_model() {
    let model = repo("models/trig.model");
    let o = run(&["validate", "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("model_hash"));
    assert!(text.lines().any(|l| l.starts_with("curves") && l.trim_end().ends_with('2')), "{text}");
}

#[test]
fn crossing_model_fails_with_runtime_error() {
    let model = repo("models/crossing.model");
    let o = run(&["validate", "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("multicritical"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["mc", "--model", "builtin:trig", "--samples", "0", "--out", out]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--model", "builtin:nonexistent"]).status.code(), Some(2));
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[run]\nmodel = \"builtin:trig\"\ncolour = 3\n").unwrap();
    assert_eq!(run(&["validate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn analytic_i2_for_trig() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analytic", "--model", "builtin:trig", "--n", "64", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("I2 = 1.128379"), "{}", stdout(&o));
    let doc = read_json(&dir.path().join("analytic.json"));
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["kind"], "analytic");
    assert_eq!(doc["config"]["run"]["n"], 64);
    assert!(doc["model_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn curves_csv_carries_run_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["curves", "--model", "builtin:fig3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# model_hash="));
    assert!(lines.next().unwrap().starts_with("# config={"));
    assert!(lines.next().unwrap().starts_with("curve_id,t,p,q"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "[run]\nmodel = \"builtin:trig\"\nn = 8\nsamples = 50\nseed = 3\nout = \"{}\"\n\n[mc]\nbootstrap = 50\noracle_checks = 2\n",
            out.display()
        ),
    )
    .unwrap();
    let o = run(&["mc", "--config", cfg.to_str().unwrap(), "--n", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&out.join("mc_moments.json"));
    assert_eq!(doc["config"]["run"]["n"], 6);
    assert_eq!(doc["config"]["run"]["samples"], 50);
    assert_eq!(doc["payload"]["n"], 6);
    let hist = std::fs::read_to_string(out.join("histogram.csv")).unwrap();
    assert!(hist.lines().any(|l| l == "bin_left,bin_right,count,gaussian_pdf_value"));
}

#[test]
fn worker_count_does_not_change_artifacts() {
    let payload = |workers: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = run(&[
            "mc", "--model", "builtin:fig3", "--n", "5", "--samples", "120", "--seed", "9", "--workers", workers,
            "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        read_json(&dir.path().join("mc_moments.json"))["payload"].clone()
    };
    let one = payload("1");
    assert_eq!(one, payload("2"));
    assert_eq!(one, payload("4"));
}

#[test]
fn correlator_estimate_compares_with_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (mc_dir, an_dir, cmp_dir) = (d.join("mc"), d.join("an"), d.join("cmp"));
    let common = ["--model", "builtin:trig", "--n", "4"];
    let o = run(&[&["mc", "--kind", "corr", "--points", "0.2,1.3", "--samples", "4000", "--seed", "1", "--out", mc_dir.to_str().unwrap()][..], &common].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&[&["analytic", "--quantity", "corr", "--points", "0.2,1.3", "--out", an_dir.to_str().unwrap()][..], &common].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&[
        "compare",
        "--estimate", mc_dir.join("mc_corr.json").to_str().unwrap(),
        "--prediction", an_dir.join("analytic.json").to_str().unwrap(),
        "--out", cmp_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let doc = read_json(&cmp_dir.join("comparison.json"));
    assert_eq!(doc["kind"], "comparison");
    assert_eq!(doc["payload"]["pass"], true);
}

#[test]
fn mismatched_artifacts_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = run(&["mc", "--model", "builtin:trig", "--n", "4", "--samples", "40", "--out", d.join("mc").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["analytic", "--model", "builtin:trig", "--n", "6", "--quantity", "moments", "--out", d.join("an").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&[
        "compare",
        "--estimate", d.join("mc/mc_moments.json").to_str().unwrap(),
        "--prediction", d.join("an/analytic.json").to_str().unwrap(),
        "--out", d.join("cmp").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("n = 4"), "{}", stderr(&o));
}

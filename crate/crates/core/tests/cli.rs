//! The binary end to end: outputs, manifests, exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use selector_lab::fixtures::fig2_saddle;
use selector_lab::io::{read_json, write_json};
use selector_lab::manifest::RunManifest;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selector-lab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn canonical(path: &Path) -> String {
    let m: RunManifest = read_json(path).unwrap();
    m.canonical().unwrap()
}

#[test]
fn spectrum_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--model", "FIG2_SADDLE", "--out", "spec.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("spec.csv")).unwrap();
    assert!(csv.starts_with("x,y,value,index,degenerate\n"));
    assert_eq!(csv.lines().count(), 6);
    let m: RunManifest = read_json(&dir.path().join("spec.csv.manifest.json")).unwrap();
    assert_eq!(m.command, "spectrum");
    assert!(m.config_digests.contains_key("model"));
    assert_eq!(m.module_versions.len(), 8);
    assert_eq!(m.outputs["spectrum.csv"], selector_lab::manifest::sha256_hex(csv.as_bytes()));
}

#[test]
fn model_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    write_json(&dir.path().join("h.json"), &fig2_saddle()).unwrap();
    let a = run(dir.path(), &["spectrum", "--model", "h.json"]);
    let b = run(dir.path(), &["spectrum"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(dir.path().join("spectrum.manifest.json").is_file());
}

#[test]
fn radial_and_nonsqueeze() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["radial", "--profile", "FIG1_F"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("s,k,action\n"));
    assert!(text.contains(",1,-2.5"), "{text}");

    let out = run(dir.path(), &["nonsqueeze", "--r", "1.5", "--R", "1.0", "--eps", "0.05", "--out", "ns.json"]);
    assert!(out.status.success());
    let v: serde_json::Value = read_json(&dir.path().join("ns.json")).unwrap();
    assert_eq!(v["verdict"], true);
    let out = run(dir.path(), &["nonsqueeze", "--r", "1.0", "--R", "1.0", "--eps", "0.05"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], false);
    let bad = run(dir.path(), &["nonsqueeze", "--r", "1.0", "--R", "1.0", "--eps", "2.0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn figures_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for d in ["a", "b"] {
        let out = run(dir.path(), &["figures", "--name", "FIG1_F", "--out-dir", d]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["fig1_curves.csv", "fig1_minima.csv"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(dir.path().join("b").join(f)).unwrap());
    }
    assert_eq!(canonical(&dir.path().join("a/manifest.json")), canonical(&dir.path().join("b/manifest.json")));
}

#[test]
fn check_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for m in ["m1.json", "m2.json"] {
        let out = run(dir.path(), &["check", "--only", "8,9", "--manifest", m]);
        assert!(out.status.success());
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().filter(|l| l.contains("PASS")).count(), 2, "{err}");
    }
    assert_eq!(canonical(&dir.path().join("m1.json")), canonical(&dir.path().join("m2.json")));
}

#[test]
fn check_fails_on_tampered_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let mut h = fig2_saddle();
    h.bumps[0].amplitude = 5.0;
    write_json(&dir.path().join("fx.json"), &serde_json::json!({ "FIG2_SADDLE": h })).unwrap();
    let out = run(dir.path(), &["check", "--only", "1", "--fixtures", "fx.json", "--out", "check.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("check.txt")).unwrap();
    assert!(report.contains("FAIL"), "{report}");
}

#[test]
fn unknown_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["spectrum", "--model", "NOPE"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["check", "--only", "bogus"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["axioms", "--selector", "other"]).status.code(), Some(2));
}

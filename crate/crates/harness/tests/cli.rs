//! End-to-end checks of the `onmt` binary: exit codes, file outputs, and
//! the generate/filter round trip.

use std::path::Path;
use std::process::Command;

fn onmt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onmt"))
}

#[test]
fn list_names_bundled_scenarios() {
    let out = onmt().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["toy1", "poisson-sweep", "no-harm", "deltasigma"] {
        assert!(text.contains(name), "missing {name} in: {text}");
    }
}

#[test]
fn validate_accepts_bundled_and_rejects_garbage() {
    let out = onmt().args(["validate", "toy1"]).output().unwrap();
    assert!(out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "schema = 1\nname = \"bad\"\nseed = 1\n\n[poisson-sweep]\nlambda_factors = [-1.0]\n",
    )
    .unwrap();
    let out = onmt().args(["validate", bad.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lambda_factors"), "{err}");
}

#[test]
fn validate_unknown_name_fails_with_diagnostic() {
    let out = onmt().args(["validate", "no-such-scenario"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no-such-scenario"), "{err}");
}

#[test]
fn describe_prints_resolved_toml() {
    let out = onmt().args(["describe", "no-harm"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("schema = 1"));
    assert!(text.contains("[no-harm]"));
    assert!(text.contains("b0_hz"));
}

#[test]
fn generate_roundtrips_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "bin"] {
        let path = dir.path().join(format!("sig.{format}"));
        let out = onmt()
            .args([
                "generate",
                "--kind",
                "thermal",
                "--rate",
                "8000",
                "--duration",
                "0.05",
                "--seed",
                "7",
                "--format",
                format,
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let sig = onmt_harness::formats::read_signal(&path).unwrap();
        assert_eq!(sig.len(), 400);
    }
}

#[test]
fn generate_rejects_unknown_kind() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let out = onmt()
        .args([
            "generate",
            "--kind",
            "fractal",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn filter_applies_design_json() {
    let dir = tempfile::tempdir().unwrap();
    let sig_path = dir.path().join("in.csv");
    let out_path = dir.path().join("out.csv");
    let design_path = dir.path().join("lp.json");

    let status = onmt()
        .args([
            "generate",
            "--kind",
            "square",
            "--period",
            "0.01",
            "--rate",
            "8000",
            "--duration",
            "0.2",
            "--out",
            sig_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());

    let design = onmt_core::iir::design_iir(
        onmt_core::iir::IirFamily::Butterworth,
        onmt_core::iir::IirResponse::Lowpass { cutoff_hz: 150.0 },
        4,
        8000.0,
    )
    .unwrap();
    let json = serde_json::to_string_pretty(&onmt_harness::formats::iir_to_json(&design)).unwrap();
    std::fs::write(&design_path, json).unwrap();

    let out = onmt()
        .args([
            "filter",
            "--design",
            design_path.to_str().unwrap(),
            "--input",
            sig_path.to_str().unwrap(),
            "--output",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // A 150 Hz lowpass on a 100 Hz square leaves mostly the fundamental.
    let filtered = onmt_harness::formats::read_signal(&out_path).unwrap();
    let k = onmt_core::robust::peakedness_dbg(&filtered.samples()[800..]).unwrap();
    assert!((k + 3.01).abs() < 0.5, "filtered square should be sine-like, got {k} dBG");
}

#[test]
fn run_writes_results_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = onmt()
        .args([
            "run",
            "toy1",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let base = dir.path().join("toy1");
    for file in [
        "results.csv",
        "meta.json",
        "panels-destructive.csv",
        "panels-destructive.svg",
        "panels-constructive.csv",
        "panels-constructive.svg",
    ] {
        assert!(base.join(file).exists(), "missing {file}");
    }
    let results = std::fs::read_to_string(base.join("results.csv")).unwrap();
    assert!(results.lines().count() >= 3, "{results}");
}

#[test]
fn seed_override_changes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |seed: &str, sub: &str| -> Vec<u8> {
        let out_dir = dir.path().join(sub);
        let out = onmt()
            .args([
                "sweep",
                "no-harm",
                "--seed",
                seed,
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(out_dir.join("no-harm/results.csv")).unwrap()
    };
    let a = run_with("1", "a");
    let b = run_with("2", "b");
    let a2 = run_with("1", "c");
    assert_ne!(a, b, "different seeds must change the measurements");
    assert_eq!(a, a2, "same seed must reproduce byte-identical results");
}

#[test]
fn sweep_emits_table_without_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = onmt()
        .args(["sweep", "toy1", "--out-dir", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let base = dir.path().join("toy1");
    assert!(base.join("results.csv").exists());
    assert!(!base.join("panels-destructive.csv").exists());
    let _ = Path::new("x");
}

use std::path::Path;
use std::process::{Command, Output};

use csd_core::synthetic::{gaussian_network, WeightScale};
use csd_core::{encode_tensor_file, WeightCollection, WeightTensor};

fn csd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csd"))
        .args(args)
        .output()
        .expect("spawn csd")
}

fn write_network(path: &Path, shapes: &[&[usize]], seed: u64) {
    let c = gaussian_network(shapes, seed, WeightScale::FanIn, "tiny").unwrap();
    std::fs::write(path, encode_tensor_file(&c)).unwrap();
}

fn analyze(weights: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "analyze",
        "--weights",
        weights.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    csd(&args)
}

#[test]
fn analyze_single_layer_writes_report_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.safetensors");
    write_network(&w, &[&[24, 8, 3, 3]], 3);
    let out = dir.path().join("run");
    let o = analyze(&w, &out, &["--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["ensemble"]["m"], 1);
    assert_eq!(report["ensemble"]["orders"][0], 24);
    assert_eq!(report["ensemble"]["pooled_count"], 24);
    assert_eq!(report["cue"]["pooled_count"], 24);
    assert_eq!(report["config"]["seed"], 5);
    assert_eq!(report["architecture"], "tiny");

    let csv = std::fs::read_to_string(out.join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("epsilon,rho_layer,rho_cue,delta,cumulative")
    );
    assert_eq!(lines.count(), 1000);
}

#[test]
fn bias_only_tensors_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.safetensors");
    let c = WeightCollection::new(
        vec![
            WeightTensor::from_f32(
                "fc.weight",
                vec![4, 6],
                (0..24).map(|i| i as f32 * 0.1 - 1.0).collect(),
            )
            .unwrap(),
            WeightTensor::from_f32("fc.bias", vec![4], vec![0.0; 4]).unwrap(),
        ],
        Default::default(),
    )
    .unwrap();
    std::fs::write(&w, encode_tensor_file(&c)).unwrap();
    let o = analyze(&w, &dir.path().join("r"), &[]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("r/report.json")).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(
        report["ensemble"]["members"],
        serde_json::json!(["fc.weight"])
    );
}

#[test]
fn corrupt_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("bad.safetensors");
    let mut bytes = 64u64.to_le_bytes().to_vec();
    bytes.extend_from_slice(b"{\"a\": {\"dtype\": \"F32\"");
    std::fs::write(&w, bytes).unwrap();
    let o = analyze(&w, &dir.path().join("r"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert!(!dir.path().join("r/report.json").exists());
}

#[test]
fn missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = analyze(&dir.path().join("nope"), &dir.path().join("r"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unsupported_dtype_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("i8.safetensors");
    let header = br#"{"a":{"dtype":"I8","shape":[2,2],"data_offsets":[0,4]}}"#;
    let mut bytes = (header.len() as u64).to_le_bytes().to_vec();
    bytes.extend_from_slice(header);
    bytes.extend_from_slice(&[1, 2, 3, 4]);
    std::fs::write(&w, bytes).unwrap();
    let o = analyze(&w, &dir.path().join("r"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_is_reflexive_and_rejects_grid_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.safetensors");
    write_network(&w, &[&[16, 4, 3, 3], &[32, 16]], 9);
    assert!(analyze(&w, &dir.path().join("a"), &[]).status.success());
    assert!(analyze(&w, &dir.path().join("b"), &["--bins", "500"])
        .status
        .success());
    let a = dir.path().join("a/report.json");
    let b = dir.path().join("b/report.json");

    let o = csd(&[
        "compare",
        a.to_str().unwrap(),
        a.to_str().unwrap(),
        "--delta",
        "0.05",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["var_a"], v["var_b"]);
    assert_eq!(v["delta_threshold"], 0.05);
    assert_eq!(v["equivalent"], v["conjugate_a"]);

    let o = csd(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_rejects_malformed_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    std::fs::write(&p, "{}").unwrap();
    let o = csd(&["compare", p.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_exit_codes() {
    let o = csd(&["selftest"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let o = csd(&["selftest", "--tolerance-scale", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn synth_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("s.safetensors");
    let o = csd(&[
        "synth",
        "--shapes",
        "8x2x3x3,4x8",
        "--seed",
        "3",
        "--out",
        w.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let c = csd_core::parse_tensor_file(&std::fs::read(&w).unwrap()).unwrap();
    let shapes: Vec<&[usize]> = c.tensors().iter().map(|t| t.shape()).collect();
    assert_eq!(shapes, vec![&[8, 2, 3, 3][..], &[4, 8][..]]);
}

#[test]
fn usage_errors_are_nonzero() {
    assert_ne!(csd(&["analyze"]).status.code(), Some(0));
    assert_ne!(
        csd(&["analyze", "--weights", "x", "--scaling", "bogus"])
            .status
            .code(),
        Some(0)
    );
}

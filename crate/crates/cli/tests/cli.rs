use std::path::Path;
use std::process::{Command, Output};

use entwit_cli::statefile::StateFile;
use entwit_core::linalg::ComplexMatrix;
use entwit_core::states::bell_state;
use entwit_core::witness::evaluate;
use entwit_core::Dims;
use serde_json::Value;

fn entwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entwit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write_state(path: &Path, m: &ComplexMatrix, dims: &Dims) {
    StateFile::from_matrix(m, dims, None).write(path).unwrap();
}

#[test]
fn bell_e_dw() {
    let out = entwit(&["measure", "--state", "builtin:bell", "--measures", "e_dw"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["e_dw"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["e_w"].is_null());
}

#[test]
fn ghz_schmidt_across_cut() {
    let out = entwit(&["measure", "--state", "builtin:ghz", "--scheme", "cut=0", "--measures", "schmidt"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["schmidt_product"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn maximally_mixed_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mm.json");
    write_state(&path, &ComplexMatrix::identity(4).scale(0.25), &Dims::qubits(2));
    let out = entwit(&["measure", "--state", path.to_str().unwrap(), "--measures", "e_w", "--dims", "2,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["e_w"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // trace 1 but indefinite
    write_state(&path, &ComplexMatrix::from_real_diagonal(&[0.75, 0.5, -0.25, 0.0]), &Dims::qubits(2));
    let out = entwit(&["measure", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive semidefinite"));

    for args in [
        &["measure", "--state", "builtin:nope"][..],
        &["measure", "--state", "builtin:bell", "--dims", "2,3"],
        &["measure", "--state", "builtin:bell", "--scheme", "cut=5"],
        &["measure", "--state", "builtin:bell", "--measures", "bogus"],
        &["measure", "--state", "builtin:werner:0.5", "--measures", "schmidt"],
        &["measure", "--state", "/does/not/exist.json"],
        &["measure", "--state", "builtin:bell", "--restarts", "0"],
        &["measure", "--bogus-flag"],
    ] {
        assert_eq!(entwit(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn non_convergence_exit_3_still_reports() {
    let out = entwit(&["measure", "--state", "builtin:bell", "--max-cuts", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["converged"], Value::Bool(false));
}

#[test]
fn bell_witness_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("w.json");
    let out = entwit(&["witness", "--state", "builtin:bell", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let w = StateFile::read(&out_path).unwrap().to_witness().unwrap();
    assert!((w.matrix().trace().re - 1.0).abs() < 1e-9);
    let tr = evaluate(&w, &bell_state()).unwrap();
    assert!((tr + 0.5).abs() < 2e-3, "Tr(W rho) = {tr}");
    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.sidecar.json")).unwrap()).unwrap();
    assert!((sidecar["e_w"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert_eq!(sidecar["detected"], Value::Bool(true));
    assert!(sidecar["cuts_used"].as_u64().unwrap() > 0);
    assert_eq!(sidecar["certificate"]["factors"].as_array().unwrap().len(), 2);
}

#[test]
fn separable_witness_not_detected() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("sep.json");
    write_state(&state, &ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]), &Dims::qubits(2));
    let out_path = dir.path().join("w.json");
    let side = dir.path().join("meta.json");
    let out = entwit(&[
        "witness",
        "--state",
        state.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--sidecar",
        side.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
    assert_eq!(v["e_w"].as_f64(), Some(0.0));
    assert_eq!(v["detected"], Value::Bool(false));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = entwit(&[
            "sweep", "--family", "wghz", "--points", "3", "--measures", "dw_cut,cut", "--seed", "4", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,cut,dw_cut");
    assert_eq!(lines.len(), 4);
    for row in &lines[1..] {
        let f: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[1] - f[2]).abs() <= 2e-3, "{row}");
    }
}

#[test]
fn sweep_errors() {
    let out = entwit(&["sweep", "--family", "nope", "--out", "/tmp/x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = entwit(&["sweep", "--points", "2", "--measures", "dw_cut", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quick_selftest() {
    let out = entwit(&["selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failed"));
}

use entwit_core::linalg::{partial_transpose, ComplexMatrix, Dims};
use entwit_core::selftest::Selftest;
use entwit_core::Result;

/// Partial transpose that leaves one off-diagonal entry untransposed.
fn corrupted_pt(m: &ComplexMatrix, dims: &Dims, set: &[usize]) -> Result<ComplexMatrix> {
    let mut out = partial_transpose(m, dims, set)?;
    out.set(0, 1, m.get(0, 1));
    Ok(out)
}

#[test]
fn wrong_partial_transpose_is_caught() {
    let suite = Selftest {
        partial_transpose: corrupted_pt,
        ..Selftest::new(true)
    };
    let out = suite.run();
    let involution = out
        .iter()
        .find(|o| o.name == "partial transpose is an involution")
        .unwrap();
    assert!(!involution.passed);
    assert!(out.iter().filter(|o| !o.passed).count() >= 1);
}

#[test]
fn correct_partial_transpose_passes() {
    let out = Selftest::new(true).run();
    assert!(out.iter().all(|o| o.passed));
}

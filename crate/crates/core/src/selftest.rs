//! Built-in invariant checks, run by `entwit selftest`.

use std::time::Instant;

use crate::basis::HermitianBasis;
use crate::error::Result;
use crate::linalg::{
    eigenvalues, hermitian_eigensystem, partial_trace, partial_transpose, schmidt_decompose, tensor_product,
    ComplexMatrix, Dims,
};
use crate::lp::CuttingPlaneLp;
use crate::measures::{full_report, pure_state_e_w, MeasureSelection};
use crate::oracle::violation_oracle;
use crate::partition::{enumerate_partitions, Partition, PartitionScheme};
use crate::rng::{derive_seed, rng};
use crate::solver::{solve, SolverConfig, WitnessProblem};
use crate::states::{
    bell_state, random_mixed_state, random_pure_state, random_separable_state, random_unitary, validate,
    werner_state, wghz_mixture, DensityOperator,
};
use crate::witness::{e_dw, is_witness_sampled, negativity, Witness};

/// Partial transpose implementation under test.
pub type PartialTransposeFn = fn(&ComplexMatrix, &Dims, &[usize]) -> Result<ComplexMatrix>;

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub struct Selftest {
    pub quick: bool,
    pub seed: u64,
    pub partial_transpose: PartialTransposeFn,
}

type Check = fn(&Selftest) -> std::result::Result<(), String>;

const CHECKS: &[(&str, &str, Check)] = &[
    ("tensor-linalg", "partial transpose is an involution", pt_involution),
    ("tensor-linalg", "partial transpose preserves trace", pt_trace),
    ("tensor-linalg", "partial trace of a product", partial_trace_product),
    ("tensor-linalg", "eigen and Schmidt reconstruct", reconstructions),
    ("state-zoo", "random states validate", random_states_valid),
    ("state-zoo", "validate rejects indefinite input", validate_rejects),
    ("state-zoo", "enumerated partition count", partition_count),
    ("witness-core", "Bell state PT spectrum", bell_pt),
    ("witness-core", "two-qubit e_dw equals negativity", edw_negativity),
    ("witness-core", "basis round trip", basis_round_trip),
    ("oew-solver", "LP on a known instance", lp_known),
    ("oew-solver", "oracle finds the identity minimum", oracle_identity),
    ("oew-solver", "Bell and product states", solver_reference),
    ("oew-solver", "witness passes sampled audit", solver_audit),
    ("measures", "Werner closed forms", werner_forms),
    ("measures", "Schmidt product matches solver", schmidt_vs_solver),
    ("measures", "W/GHZ cut endpoints", wghz_endpoints),
];

fn fail(msg: impl Into<String>) -> std::result::Result<(), String> {
    Err(msg.into())
}

fn ok_or<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

impl Selftest {
    pub fn new(quick: bool) -> Self {
        Selftest {
            quick,
            seed: 0,
            partial_transpose,
        }
    }

    fn samples(&self, quick: usize, full: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }

    pub fn run(&self) -> Vec<CheckOutcome> {
        CHECKS
            .iter()
            .map(|&(module, name, check)| {
                let t = Instant::now();
                let r = check(self);
                CheckOutcome {
                    module,
                    name,
                    passed: r.is_ok(),
                    detail: r.err().unwrap_or_default(),
                    seconds: t.elapsed().as_secs_f64(),
                }
            })
            .collect()
    }
}

/// Fixed-width pass/fail table.
pub fn format_table(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {:<14} {:<40} {:>7.2}s", o.module, o.name, o.seconds));
        if !o.passed {
            out.push_str(&format!("  {}", o.detail));
        }
        out.push('\n');
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", outcomes.len(), failed));
    out
}

fn random_states(t: &Selftest, dims: &Dims, n: usize, salt: u64) -> Vec<DensityOperator> {
    let mut r = rng(derive_seed(t.seed, salt));
    (0..n).map(|_| random_mixed_state(dims, &mut r)).collect()
}

fn pt_involution(t: &Selftest) -> std::result::Result<(), String> {
    for dims in [Dims::qubits(2), Dims::new(vec![2, 3]).unwrap(), Dims::qubits(3)] {
        for (i, rho) in random_states(t, &dims, t.samples(3, 10), 1).iter().enumerate() {
            for set in [vec![0], vec![1], vec![0, 1]] {
                let once = ok_or((t.partial_transpose)(rho.matrix(), &dims, &set))?;
                let twice = ok_or((t.partial_transpose)(&once, &dims, &set))?;
                let dev = twice.max_abs_diff(rho.matrix());
                if dev > 1e-12 {
                    return fail(format!("dims {dims}, sample {i}, set {set:?}: deviation {dev:e}"));
                }
            }
        }
    }
    Ok(())
}

fn pt_trace(t: &Selftest) -> std::result::Result<(), String> {
    let dims = Dims::new(vec![2, 3]).unwrap();
    for rho in random_states(t, &dims, t.samples(3, 10), 2) {
        let pt = ok_or((t.partial_transpose)(rho.matrix(), &dims, &[0]))?;
        let dev = (pt.trace() - rho.matrix().trace()).norm();
        if dev > 1e-12 {
            return fail(format!("trace changed by {dev:e}"));
        }
    }
    Ok(())
}

fn partial_trace_product(t: &Selftest) -> std::result::Result<(), String> {
    let a = &random_states(t, &Dims::qubits(1), 1, 3)[0];
    let b = &random_states(t, &Dims::new(vec![3]).unwrap(), 1, 4)[0];
    let ab = ok_or(tensor_product(a.matrix(), b.matrix()))?;
    let dims = Dims::new(vec![2, 3]).unwrap();
    let ra = ok_or(partial_trace(&ab, &dims, &[0]))?;
    let rb = ok_or(partial_trace(&ab, &dims, &[1]))?;
    let dev = ra.max_abs_diff(a.matrix()).max(rb.max_abs_diff(b.matrix()));
    if dev > 1e-12 {
        return fail(format!("marginal deviation {dev:e}"));
    }
    Ok(())
}

fn reconstructions(t: &Selftest) -> std::result::Result<(), String> {
    let dims = Dims::new(vec![3, 3]).unwrap();
    for i in 0..t.samples(3, 10) {
        let rho = &random_states(t, &dims, 1, 10 + i as u64)[0];
        let es = ok_or(hermitian_eigensystem(rho.matrix()))?;
        let mut back = ComplexMatrix::zeros(9, 9);
        for k in 0..9 {
            back = back.add(&ComplexMatrix::projector(&es.vector(k)).scale(es.values[k]));
        }
        let dev = back.max_abs_diff(rho.matrix());
        if dev > 1e-10 {
            return fail(format!("eigen reconstruction deviation {dev:e}"));
        }
        let psi = random_pure_state(&dims, derive_seed(t.seed, 20 + i as u64));
        let s = ok_or(schmidt_decompose(&psi, &dims))?;
        let dev = (s.reconstruct() - &psi).norm();
        if dev > 1e-10 {
            return fail(format!("Schmidt reconstruction deviation {dev:e}"));
        }
    }
    Ok(())
}

fn random_states_valid(t: &Selftest) -> std::result::Result<(), String> {
    let dims = Dims::qubits(3);
    for rho in random_states(t, &dims, t.samples(5, 20), 30) {
        ok_or(validate(rho.matrix().clone(), dims.clone()))?;
    }
    let mut r = rng(derive_seed(t.seed, 31));
    let part = Partition::singletons(3);
    for _ in 0..t.samples(3, 10) {
        let sep = ok_or(random_separable_state(&dims, &part, 4, &mut r))?;
        ok_or(validate(sep.matrix().clone(), dims.clone()))?;
    }
    for p in [0.0, 0.5, 1.0] {
        ok_or(wghz_mixture(p))?;
    }
    Ok(())
}

fn validate_rejects(_: &Selftest) -> std::result::Result<(), String> {
    let bad = ComplexMatrix::from_real_diagonal(&[1.2, -0.2]);
    match validate(bad, Dims::new(vec![2]).unwrap()) {
        Ok(_) => fail("indefinite matrix accepted"),
        Err(_) => Ok(()),
    }
}

fn partition_count(_: &Selftest) -> std::result::Result<(), String> {
    // 1 finest + 6 with one pair + 3 with two pairs
    let n = enumerate_partitions(4, 2).len();
    if n != 10 {
        return fail(format!("expected 10 partitions, found {n}"));
    }
    Ok(())
}

fn bell_pt(t: &Selftest) -> std::result::Result<(), String> {
    let bell = bell_state();
    let pt = ok_or((t.partial_transpose)(bell.matrix(), bell.dims(), &[0]))?;
    let ev = ok_or(eigenvalues(&pt))?;
    let want = [-0.5, 0.5, 0.5, 0.5];
    if ev.iter().zip(want).any(|(a, b)| (a - b).abs() > 1e-12) {
        return fail(format!("spectrum {ev:?}"));
    }
    Ok(())
}

fn edw_negativity(t: &Selftest) -> std::result::Result<(), String> {
    for rho in random_states(t, &Dims::qubits(2), t.samples(10, 50), 40) {
        let (a, b) = (ok_or(e_dw(&rho, &[0]))?, ok_or(negativity(&rho, &[0]))?);
        if (a - b).abs() > 1e-12 {
            return fail(format!("e_dw {a} vs negativity {b}"));
        }
    }
    Ok(())
}

fn basis_round_trip(t: &Selftest) -> std::result::Result<(), String> {
    let basis = HermitianBasis::new(6);
    for rho in random_states(t, &Dims::new(vec![2, 3]).unwrap(), t.samples(3, 10), 50) {
        let back = basis.assemble(&basis.coordinates(rho.matrix()));
        let dev = back.max_abs_diff(rho.matrix());
        if dev > 1e-12 {
            return fail(format!("deviation {dev:e}"));
        }
    }
    Ok(())
}

fn lp_known(_: &Selftest) -> std::result::Result<(), String> {
    // min y0 + y1 s.t. y0 + y1 >= -1, -y0 + 2 y1 >= -0.5 → optimum -1
    let mut lp = ok_or(CuttingPlaneLp::new(vec![1.0, 1.0], 10.0))?;
    ok_or(lp.add_cut(&[1.0, 1.0], -1.0))?;
    ok_or(lp.add_cut(&[-1.0, 2.0], -0.5))?;
    let s = ok_or(lp.solve())?;
    if (s.objective + 1.0).abs() > 1e-9 {
        return fail(format!("objective {}", s.objective));
    }
    Ok(())
}

fn oracle_identity(t: &Selftest) -> std::result::Result<(), String> {
    let dims = Dims::qubits(3);
    let w = Witness::identity(dims);
    let scheme = ok_or(PartitionScheme::m_separable(3, 2))?;
    let out = ok_or(violation_oracle(&w, &scheme, t.samples(2, 5), t.seed))?;
    if (out.value - 0.125).abs() > 1e-12 {
        return fail(format!("minimum {}", out.value));
    }
    Ok(())
}

fn solver_reference(t: &Selftest) -> std::result::Result<(), String> {
    let scheme = ok_or(PartitionScheme::m_separable(2, 1))?;
    let config = SolverConfig::default().with_seed(t.seed);
    let bell = ok_or(solve(&ok_or(WitnessProblem::new(bell_state(), scheme.clone(), config.clone()))?))?;
    if (bell.e_w - 0.5).abs() > 1e-3 {
        return fail(format!("Bell e_w {}", bell.e_w));
    }
    let mut r = rng(derive_seed(t.seed, 60));
    let sep = ok_or(random_separable_state(&Dims::qubits(2), &Partition::singletons(2), 3, &mut r))?;
    let s = ok_or(solve(&ok_or(WitnessProblem::new(sep, scheme, config))?))?;
    if s.e_w > 1e-6 {
        return fail(format!("separable e_w {}", s.e_w));
    }
    Ok(())
}

fn solver_audit(t: &Selftest) -> std::result::Result<(), String> {
    let dims = Dims::new(vec![2, 3]).unwrap();
    let scheme = ok_or(PartitionScheme::m_separable(2, 1))?;
    for (i, rho) in random_states(t, &dims, t.samples(1, 3), 70).into_iter().enumerate() {
        let config = SolverConfig::default().with_seed(derive_seed(t.seed, 70 + i as u64));
        let r = ok_or(solve(&ok_or(WitnessProblem::new(rho, scheme.clone(), config))?))?;
        let audit = ok_or(is_witness_sampled(&r.witness, &scheme, t.samples(10_000, 100_000), t.seed))?;
        if audit.min_value < -1e-5 {
            return fail(format!("audit minimum {}", audit.min_value));
        }
    }
    Ok(())
}

fn werner_forms(_: &Selftest) -> std::result::Result<(), String> {
    let rho = ok_or(werner_state(0.6))?;
    let (a, b) = (ok_or(e_dw(&rho, &[0]))?, ok_or(negativity(&rho, &[0]))?);
    if (a - 0.2).abs() > 1e-12 || (b - 0.2).abs() > 1e-12 {
        return fail(format!("e_dw {a}, negativity {b}"));
    }
    Ok(())
}

fn schmidt_vs_solver(t: &Selftest) -> std::result::Result<(), String> {
    let dims = Dims::qubits(2);
    let mut r = rng(derive_seed(t.seed, 80));
    let u = random_unitary(4, &mut r);
    let psi = u.inner().column(0).into_owned();
    let rho = ok_or(DensityOperator::from_pure(&psi, dims.clone()))?;
    let want = ok_or(pure_state_e_w(&psi, &dims, &[0]))?;
    let scheme = ok_or(PartitionScheme::m_separable(2, 1))?;
    let rep = ok_or(full_report(
        &rho,
        &scheme,
        &SolverConfig::default().with_seed(t.seed),
        MeasureSelection::parse("e_w,schmidt").expect("valid list"),
    ))?;
    let got = rep.e_w.unwrap_or(f64::NAN);
    let closed = rep.schmidt_product.unwrap_or(f64::NAN);
    if (got - want).abs() > 1e-3 || (closed - want).abs() > 1e-9 {
        return fail(format!("solver {got} vs a1 a2 {want}"));
    }
    Ok(())
}

fn wghz_endpoints(_: &Selftest) -> std::result::Result<(), String> {
    let w = ok_or(wghz_mixture(0.0))?;
    let ghz = ok_or(wghz_mixture(1.0))?;
    let (a, b) = (ok_or(e_dw(&w, &[0, 1]))?, ok_or(e_dw(&ghz, &[0, 1]))?);
    if (a - 2f64.sqrt() / 3.0).abs() > 1e-12 || (b - 0.5).abs() > 1e-12 {
        return fail(format!("W {a}, GHZ {b}"));
    }
    let marginal = ok_or(ghz.reduced(&[0, 1]))?;
    let m = ok_or(e_dw(&marginal, &[0]))?;
    if m != 0.0 {
        return fail(format!("GHZ marginal e_dw {m}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let out = Selftest::new(true).run();
        assert!(out.iter().all(|o| o.passed), "{}", format_table(&out));
        assert_eq!(out.len(), CHECKS.len());
    }
}

//! Separation oracle: searches for product vectors on which a witness
//! candidate is most negative.
//!
//! Each restart runs block-coordinate descent. With every block but one held
//! fixed, `<π|W|π>` is a quadratic form in the free block's vector, so the
//! optimal update is the minimum eigenvector of the effective operator.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{hermitian_eigensystem, permute_subsystems, ComplexMatrix, Dims, StateVector, ZERO};
use crate::partition::{Partition, PartitionScheme, ProductVector};
use crate::rng::{derive_seed, rng, unit_vector};
use crate::witness::Witness;

pub const MAX_SWEEPS: usize = 200;
pub const SWEEP_TOL: f64 = 1e-10;

/// A local minimum of `<π|W|π>`.
#[derive(Clone, Debug)]
pub struct LocalMinimum {
    pub value: f64,
    pub vector: ProductVector,
    pub sweeps: usize,
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    /// Smallest value found.
    pub value: f64,
    pub argmin: ProductVector,
    /// Every restart's local minimum, best first.
    pub minima: Vec<LocalMinimum>,
}

/// `W` rearranged into one partition's block layout.
struct BlockProblem {
    matrix: Vec<Complex64>,
    dim: usize,
    block_dims: Vec<usize>,
    /// `slots[k][idx]`: digit of block `k` in flat index `idx`.
    slots: Vec<Vec<usize>>,
}

impl BlockProblem {
    fn new(w: &Witness, partition: &Partition) -> Result<Self> {
        let dims = w.dims();
        let permuted = permute_subsystems(w.matrix(), dims, &partition.layout())?;
        let block_dims = partition.block_dims(dims);
        let mut strides = vec![1; block_dims.len()];
        for k in (0..block_dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * block_dims[k + 1];
        }
        let dim = dims.total();
        let slots = block_dims
            .iter()
            .zip(&strides)
            .map(|(&bd, &st)| (0..dim).map(|idx| (idx / st) % bd).collect())
            .collect();
        Ok(BlockProblem {
            matrix: permuted.row_major_entries(),
            dim,
            block_dims,
            slots,
        })
    }

    /// Amplitude of the Kronecker product at every flat index, skipping block `skip`.
    fn partial_product(&self, factors: &[StateVector], skip: Option<usize>, amp: &mut [Complex64]) {
        amp.fill(Complex64::new(1.0, 0.0));
        for (k, f) in factors.iter().enumerate() {
            if Some(k) == skip {
                continue;
            }
            for (a, &s) in amp.iter_mut().zip(&self.slots[k]) {
                *a *= f[s];
            }
        }
    }

    /// Effective operator on block `j` with the other factors fixed.
    fn effective(&self, factors: &[StateVector], j: usize, scratch: &mut Scratch) -> Vec<Complex64> {
        let dj = self.block_dims[j];
        let d = self.dim;
        let slot = &self.slots[j];
        self.partial_product(factors, Some(j), &mut scratch.amp);
        let amp = &scratch.amp;
        // y_t = W u_t, with u_t(idx) = amp(idx) when slot(idx) == t
        let y = &mut scratch.y;
        y.clear();
        y.resize(dj * d, ZERO);
        for r in 0..d {
            let row = &self.matrix[r * d..(r + 1) * d];
            for ((&w, &a), &s) in row.iter().zip(amp).zip(slot) {
                y[s * d + r] += w * a;
            }
        }
        let mut m = vec![ZERO; dj * dj];
        for r in 0..d {
            let s = slot[r];
            let ca = amp[r].conj();
            for t in 0..dj {
                m[s * dj + t] += ca * y[t * d + r];
            }
        }
        m
    }

    fn value(&self, factors: &[StateVector], scratch: &mut Scratch) -> f64 {
        self.partial_product(factors, None, &mut scratch.amp);
        let amp = &scratch.amp;
        let d = self.dim;
        let mut acc = ZERO;
        for r in 0..d {
            let row = &self.matrix[r * d..(r + 1) * d];
            let wv: Complex64 = row.iter().zip(amp).map(|(w, a)| w * a).sum();
            acc += amp[r].conj() * wv;
        }
        acc.re
    }

    fn descend(&self, mut factors: Vec<StateVector>) -> Result<(f64, Vec<StateVector>, usize)> {
        let mut scratch = Scratch {
            amp: vec![ZERO; self.dim],
            y: Vec::new(),
        };
        let mut value = self.value(&factors, &mut scratch);
        let mut sweeps = 0;
        while sweeps < MAX_SWEEPS {
            sweeps += 1;
            let before = value;
            for j in 0..factors.len() {
                let m = self.effective(&factors, j, &mut scratch);
                let (lam, v) = min_eigenvector(&m, self.block_dims[j])?;
                factors[j] = v;
                value = lam;
            }
            if before - value < SWEEP_TOL {
                break;
            }
        }
        Ok((self.value(&factors, &mut scratch), factors, sweeps))
    }
}

struct Scratch {
    amp: Vec<Complex64>,
    y: Vec<Complex64>,
}

/// Minimum eigenpair of a small Hermitian matrix, with a deterministic
/// choice inside degenerate eigenspaces and the first nonzero component
/// made real positive.
pub fn min_eigenvector(m: &[Complex64], d: usize) -> Result<(f64, StateVector)> {
    if d == 1 {
        return Ok((m[0].re, StateVector::from_element(1, Complex64::new(1.0, 0.0))));
    }
    if d == 2 {
        if let Some(r) = min_eigenvector_2x2(m) {
            return Ok(r);
        }
    }
    let mut h = ComplexMatrix::from_row_major(d, d, m)?.hermitian_part();
    // tiny asymmetries from accumulation are not the caller's error
    for i in 0..d {
        let v = h.get(i, i);
        h.set(i, i, Complex64::new(v.re, 0.0));
    }
    let es = hermitian_eigensystem(&h)?;
    let lam = es.min();
    let tol = 1e-12 * lam.abs().max(1.0);
    let mut best: Option<StateVector> = None;
    for i in 0..d {
        if es.values[i] - lam > tol {
            break;
        }
        let v = es.vector(i);
        best = match best {
            None => Some(v),
            Some(b) => Some(if lex_abs_greater(&v, &b) { v } else { b }),
        };
    }
    Ok((lam, phase_fix(best.expect("nonempty spectrum"))))
}

fn lex_abs_greater(a: &StateVector, b: &StateVector) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        let (x, y) = (x.norm(), y.norm());
        if (x - y).abs() > 1e-12 {
            return x > y;
        }
    }
    false
}

fn phase_fix(mut v: StateVector) -> StateVector {
    if let Some(c) = v.iter().find(|c| c.norm() > 1e-12).copied() {
        let phase = c.conj() / c.norm();
        v *= phase;
    }
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

fn min_eigenvector_2x2(m: &[Complex64]) -> Option<(f64, StateVector)> {
    let a = m[0].re;
    let c = m[3].re;
    let b = (m[1] + m[2].conj()) * 0.5;
    let half = 0.5 * (a - c);
    let rad = (half * half + b.norm_sqr()).sqrt();
    let lam = 0.5 * (a + c) - rad;
    let scale = a.abs().max(c.abs()).max(b.norm()).max(1e-300);
    if rad <= 1e-12 * scale {
        // degenerate: every vector is an eigenvector, take |0>
        return Some((lam, StateVector::from_vec(vec![Complex64::new(1.0, 0.0), ZERO])));
    }
    // (A - λ) v = 0: rows give v ∝ (b, λ - a) or (λ - c, b*)
    let v1 = StateVector::from_vec(vec![b, Complex64::new(lam - a, 0.0)]);
    let v2 = StateVector::from_vec(vec![Complex64::new(lam - c, 0.0), b.conj()]);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    if v.norm() == 0.0 {
        return None;
    }
    Some((lam, phase_fix(v)))
}

/// Approximate minimum of `<π|W|π>` over product vectors conforming to any
/// partition of `scheme`, using `restarts` random starts per partition.
pub fn violation_oracle(
    w: &Witness,
    scheme: &PartitionScheme,
    restarts: usize,
    seed: u64,
) -> Result<OracleOutcome> {
    violation_oracle_with_starts(w, scheme, restarts, seed, &[])
}

/// As [`violation_oracle`], additionally descending from each vector in
/// `warm` (typically the previous round's violators).
pub fn violation_oracle_with_starts(
    w: &Witness,
    scheme: &PartitionScheme,
    restarts: usize,
    seed: u64,
    warm: &[ProductVector],
) -> Result<OracleOutcome> {
    let dims: &Dims = w.dims();
    scheme.check_dims(dims)?;
    let parts = scheme.partitions();
    let problems: Vec<BlockProblem> =
        parts.iter().map(|p| BlockProblem::new(w, p)).collect::<Result<_>>()?;

    let mut jobs: Vec<(usize, Option<Vec<StateVector>>)> = Vec::new();
    for pv in warm {
        if let Some(pi) = parts.iter().position(|p| p == pv.partition()) {
            jobs.push((pi, Some(pv.factors().to_vec())));
        }
    }
    for pi in 0..parts.len() {
        for _ in 0..restarts.max(1) {
            jobs.push((pi, None));
        }
    }

    let mut minima: Vec<(usize, LocalMinimum)> = jobs
        .into_par_iter()
        .enumerate()
        .map(|(i, (pi, start))| -> Result<(usize, LocalMinimum)> {
            let prob = &problems[pi];
            let factors = start.unwrap_or_else(|| {
                let mut r = rng(derive_seed(seed, i as u64));
                prob.block_dims.iter().map(|&d| unit_vector(d, &mut r)).collect()
            });
            let (value, factors, sweeps) = prob.descend(factors)?;
            let vector = ProductVector::new(dims, parts[pi].clone(), factors)?;
            Ok((i, LocalMinimum { value, vector, sweeps }))
        })
        .collect::<Result<_>>()?;
    minima.sort_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)));
    let minima: Vec<LocalMinimum> = minima.into_iter().map(|(_, m)| m).collect();
    Ok(OracleOutcome {
        value: minima[0].value,
        argmin: minima[0].vector.clone(),
        minima,
    })
}

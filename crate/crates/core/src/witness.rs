//! Entanglement witnesses, decomposable witnesses and the partial-transpose
//! measures derived from them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, partial_transpose, ComplexMatrix, Dims, HERMITIAN_TOL};
use crate::partition::{PartitionScheme, ProductVector};
use crate::rng::{derive_seed, rng};
use crate::states::DensityOperator;

/// Imaginary part of `Tr(Wρ)` tolerated before the inputs are declared corrupt.
pub const IMAG_TOL: f64 = 1e-10;

/// Eigenvalues within this distance of the minimum share its eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Value below which a sampled expectation counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Hermitian operator normalized to unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    matrix: ComplexMatrix,
    dims: Dims,
}

impl Witness {
    pub fn new(matrix: ComplexMatrix, dims: Dims) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: matrix.rows(),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("witness trace {tr} is not 1")));
        }
        Ok(Witness { matrix, dims })
    }

    /// Rescales a Hermitian operator with positive trace to unit trace.
    pub fn normalized(matrix: ComplexMatrix, dims: Dims) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 1e-300) {
            return Err(Error::Config(format!("cannot normalize operator with trace {tr}")));
        }
        Witness::new(matrix.hermitian_part().scale(1.0 / tr), dims)
    }

    /// `I/D`
    pub fn identity(dims: Dims) -> Self {
        let d = dims.total();
        Witness {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    /// `<π|W|π>` for a product vector.
    pub fn expectation(&self, pv: &ProductVector) -> f64 {
        self.matrix.expectation(pv.assembled()).re
    }
}

/// `Tr(Wρ)`
pub fn evaluate(w: &Witness, rho: &DensityOperator) -> Result<f64> {
    if w.dims != *rho.dims() {
        return Err(Error::DimensionMismatch {
            expected: w.dims.total(),
            found: rho.dimension(),
        });
    }
    let v = w.matrix.trace_product(rho.matrix());
    if v.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryPart { imag: v.im });
    }
    Ok(v.re)
}

/// `pP + (1-p)Q^{T_A}` with positive semidefinite `P`, `Q`.
#[derive(Clone, Debug)]
pub struct DecomposableWitness {
    p: f64,
    positive: ComplexMatrix,
    copositive: ComplexMatrix,
    cut: Vec<usize>,
    dims: Dims,
}

impl DecomposableWitness {
    pub fn new(
        p: f64,
        positive: ComplexMatrix,
        copositive: ComplexMatrix,
        cut: Vec<usize>,
        dims: Dims,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange { value: p });
        }
        for m in [&positive, &copositive] {
            let min = hermitian_eigensystem(m)?.min();
            if min < -1e-9 {
                return Err(Error::Config(format!(
                    "decomposable witness factor has eigenvalue {min}"
                )));
            }
        }
        Ok(DecomposableWitness {
            p,
            positive,
            copositive,
            cut,
            dims,
        })
    }

    /// The assembled operator, rescaled to unit trace.
    pub fn assemble(&self) -> Result<Witness> {
        let qt = partial_transpose(&self.copositive, &self.dims, &self.cut)?;
        let m = self.positive.scale(self.p).add(&qt.scale(1.0 - self.p));
        Witness::normalized(m, self.dims.clone())
    }
}

/// The closed-form optimal decomposable witness for a cut.
#[derive(Clone, Debug)]
pub struct DecomposableOptimum {
    pub witness: Witness,
    /// `λ_min(ρ^{T_A})`
    pub min_eigenvalue: f64,
    /// Dimension of the projected eigenspace.
    pub multiplicity: usize,
    /// Whether the witness detects entanglement (`λ_min < 0`).
    pub detected: bool,
}

/// `P^{T_A}/Tr P`, where `P` projects onto the minimum eigenspace of `ρ^{T_A}`.
pub fn optimal_decomposable_witness(rho: &DensityOperator, cut: &[usize]) -> Result<DecomposableOptimum> {
    check_cut(rho.dims(), cut)?;
    let pt = rho.partial_transpose(cut)?;
    let es = hermitian_eigensystem(&pt.hermitian_part())?;
    let min = es.min();
    let d = rho.dimension();
    let mut proj = ComplexMatrix::zeros(d, d);
    let mut k = 0;
    for (i, &lam) in es.values.iter().enumerate() {
        if lam - min > DEGENERACY_TOL {
            break;
        }
        proj = proj.add(&ComplexMatrix::projector(&es.vector(i)));
        k += 1;
    }
    let w = partial_transpose(&proj, rho.dims(), cut)?.scale(1.0 / k as f64);
    Ok(DecomposableOptimum {
        witness: Witness::new(w.hermitian_part(), rho.dims().clone())?,
        min_eigenvalue: min,
        multiplicity: k,
        detected: min < 0.0,
    })
}

fn check_cut(dims: &Dims, cut: &[usize]) -> Result<()> {
    let n = dims.parties();
    if cut.is_empty() || cut.len() >= n {
        return Err(Error::InvalidPartition(
            "cut must split the parties into two nonempty groups".into(),
        ));
    }
    let mut seen = vec![false; n];
    for &k in cut {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, parties: n });
        }
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::InvalidPartition(format!("party {k} repeated in cut")));
        }
    }
    Ok(())
}

fn pt_spectrum(rho: &DensityOperator, cut: &[usize]) -> Result<Vec<f64>> {
    check_cut(rho.dims(), cut)?;
    let pt = rho.partial_transpose(cut)?;
    Ok(hermitian_eigensystem(&pt.hermitian_part())?.values)
}

/// Decomposable witnessed entanglement `|min(λ_min(ρ^{T_A}), 0)|`.
pub fn e_dw(rho: &DensityOperator, cut: &[usize]) -> Result<f64> {
    Ok((-pt_spectrum(rho, cut)?[0]).max(0.0))
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_A}`.
pub fn negativity(rho: &DensityOperator, cut: &[usize]) -> Result<f64> {
    Ok(pt_spectrum(rho, cut)?
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(f64::abs)
        .sum())
}

/// Outcome of a randomized positivity audit.
#[derive(Clone, Debug)]
pub struct SampledAudit {
    pub min_value: f64,
    pub argmin: ProductVector,
    /// Set when `min_value < -VIOLATION_TOL`.
    pub violator: Option<ProductVector>,
    pub samples: usize,
}

const AUDIT_CHUNK: usize = 4096;

/// Evaluates `<π|W|π>` on `samples` random product vectors drawn round-robin
/// from the partitions of `scheme`.
pub fn is_witness_sampled(
    w: &Witness,
    scheme: &PartitionScheme,
    samples: usize,
    seed: u64,
) -> Result<SampledAudit> {
    if samples == 0 {
        return Err(Error::Config("audit needs at least one sample".into()));
    }
    scheme.check_dims(&w.dims)?;
    let parts = scheme.partitions();
    let chunks = samples.div_ceil(AUDIT_CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, usize, ProductVector)> {
            let mut r = rng(derive_seed(seed, c as u64));
            let start = c * AUDIT_CHUNK;
            let end = (start + AUDIT_CHUNK).min(samples);
            let mut best: Option<(f64, usize, ProductVector)> = None;
            for i in start..end {
                let pv = ProductVector::random(&w.dims, &parts[i % parts.len()], &mut r)?;
                let v = w.expectation(&pv);
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, i, pv));
                }
            }
            Ok(best.expect("chunk is nonempty"))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least one chunk");
    let (min_value, _, argmin) = best;
    Ok(SampledAudit {
        min_value,
        violator: (min_value < -VIOLATION_TOL).then(|| argmin.clone()),
        argmin,
        samples,
    })
}

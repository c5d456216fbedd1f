//! Density operators: validation, builtin families and seeded random states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result, StateViolation};
use crate::linalg::{
    eigenvalues, partial_trace, partial_transpose, tensor_product, ComplexMatrix, Dims,
    StateVector, HERMITIAN_TOL, ONE, ZERO,
};
use crate::partition::{Partition, ProductVector};
use crate::rng::{complex_gaussian, rng, unit_vector, Rng};

pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;

/// A validated multipartite mixed state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: Dims,
}

/// Accepts `matrix` as a state on `dims` iff it is Hermitian, unit trace and
/// positive semidefinite within tolerance.
pub fn validate(matrix: ComplexMatrix, dims: Dims) -> Result<DensityOperator> {
    let reject = |v| Err(Error::InvalidState(v));
    if !matrix.is_square() || matrix.rows() != dims.total() {
        return reject(StateViolation::Dimension {
            expected: dims.total(),
            found: matrix.rows(),
        });
    }
    let deviation = matrix.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return reject(StateViolation::NotHermitian { deviation });
    }
    let tr = matrix.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return reject(StateViolation::Trace { found: tr });
    }
    let min_eigenvalue = eigenvalues(&matrix)?[0];
    if min_eigenvalue < -PSD_TOL {
        return reject(StateViolation::Negative { min_eigenvalue });
    }
    Ok(DensityOperator { matrix, dims })
}

impl DensityOperator {
    pub fn from_pure(psi: &StateVector, dims: Dims) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        validate(ComplexMatrix::projector(psi), dims)
    }

    pub fn maximally_mixed(dims: Dims) -> Self {
        let d = dims.total();
        DensityOperator {
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

    pub fn dimension(&self) -> usize {
        self.dims.total()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// State of the listed parties (other parties traced out).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let m = partial_trace(&self.matrix, &self.dims, &keep)?;
        let dims = Dims::new(self.dims.select(&keep))?;
        Ok(DensityOperator { matrix: m.hermitian_part(), dims })
    }

    pub fn partial_transpose(&self, parties: &[usize]) -> Result<ComplexMatrix> {
        partial_transpose(&self.matrix, &self.dims, parties)
    }

    /// `U ρ U†`
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<DensityOperator> {
        if u.rows() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: u.rows(),
            });
        }
        let m = u.matmul(&self.matrix).matmul(&u.adjoint()).hermitian_part();
        validate(m, self.dims.clone())
    }

    /// `λ·self + (1-λ)·other`
    pub fn mix(&self, other: &DensityOperator, lambda: f64) -> Result<DensityOperator> {
        check_parameter(lambda)?;
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        let m = self.matrix.scale(lambda).add(&other.matrix.scale(1.0 - lambda));
        validate(m, self.dims.clone())
    }

    /// `(ρ + s·I/D)/(1 + s)`
    pub fn mix_with_identity(&self, s: f64) -> Result<DensityOperator> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Config(format!("mixing weight {s} must be finite and >= 0")));
        }
        let d = self.dimension() as f64;
        let m = self
            .matrix
            .add(&ComplexMatrix::identity(self.dimension()).scale(s / d))
            .scale(1.0 / (1.0 + s));
        validate(m, self.dims.clone())
    }
}

fn check_parameter(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { value: p })
    }
}

fn basis_vector(dim: usize, amplitudes: &[(usize, f64)]) -> StateVector {
    let mut v = StateVector::zeros(dim);
    for &(i, a) in amplitudes {
        v[i] = Complex64::new(a, 0.0);
    }
    v
}

pub fn bell_vector() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    basis_vector(4, &[(0b00, h), (0b11, h)])
}

pub fn ghz_vector() -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    basis_vector(8, &[(0b000, h), (0b111, h)])
}

pub fn w_vector() -> StateVector {
    let t = 1.0 / 3f64.sqrt();
    basis_vector(8, &[(0b100, t), (0b010, t), (0b001, t)])
}

/// `|Φ+⟩ = (|00⟩ + |11⟩)/√2`
pub fn bell_state() -> DensityOperator {
    DensityOperator::from_pure(&bell_vector(), Dims::qubits(2)).expect("Bell state is valid")
}

pub fn ghz_state() -> DensityOperator {
    DensityOperator::from_pure(&ghz_vector(), Dims::qubits(3)).expect("GHZ state is valid")
}

pub fn w_state() -> DensityOperator {
    DensityOperator::from_pure(&w_vector(), Dims::qubits(3)).expect("W state is valid")
}

/// `(1-p)|W⟩⟨W| + p|GHZ⟩⟨GHZ|`
pub fn wghz_mixture(p: f64) -> Result<DensityOperator> {
    check_parameter(p)?;
    ghz_state().mix(&w_state(), p)
}

/// `p|Φ+⟩⟨Φ+| + (1-p)I/4`
pub fn werner_state(p: f64) -> Result<DensityOperator> {
    check_parameter(p)?;
    bell_state().mix(&DensityOperator::maximally_mixed(Dims::qubits(2)), p)
}

/// Named state: `bell`, `ghz`, `w`, `werner:p` or `wghz:p`.
pub fn builtin(spec: &str) -> Result<DensityOperator> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => {
            let v: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad parameter `{p}` in `{spec}`")))?;
            (n.trim(), Some(v))
        }
        None => (spec.trim(), None),
    };
    match (name, param) {
        ("bell", None) => Ok(bell_state()),
        ("ghz", None) => Ok(ghz_state()),
        ("w", None) => Ok(w_state()),
        ("werner", Some(p)) => werner_state(p),
        ("wghz", Some(p)) => wghz_mixture(p),
        ("bell" | "ghz" | "w", Some(_)) => Err(Error::Config(format!("`{name}` takes no parameter"))),
        ("werner" | "wghz", None) => Err(Error::Config(format!("`{name}` needs a parameter, e.g. {name}:0.5"))),
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

/// Haar-random pure state on the full space.
pub fn random_pure_state(dims: &Dims, seed: u64) -> StateVector {
    unit_vector(dims.total(), &mut rng(seed))
}

pub fn random_product_state(dims: &Dims, blocks: &Partition, seed: u64) -> Result<ProductVector> {
    ProductVector::random(dims, blocks, &mut rng(seed))
}

/// Hilbert-Schmidt random mixed state `G G† / Tr(G G†)` of full rank.
pub fn random_mixed_state(dims: &Dims, rng: &mut Rng) -> DensityOperator {
    let d = dims.total();
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = ComplexMatrix::from_inner(m).scale(1.0 / tr).hermitian_part();
    validate(m, dims.clone()).expect("Ginibre state is valid")
}

/// Random mixture of `terms` random product states across `partition`.
pub fn random_separable_state(
    dims: &Dims,
    partition: &Partition,
    terms: usize,
    rng: &mut Rng,
) -> Result<DensityOperator> {
    let d = dims.total();
    let mut m = ComplexMatrix::zeros(d, d);
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| -rand::Rng::random::<f64>(rng).ln()).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let pv = ProductVector::random(dims, partition, rng)?;
        m = m.add(&ComplexMatrix::projector(pv.assembled()).scale(w / total));
    }
    validate(m.hermitian_part(), dims.clone())
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary(d: usize, rng: &mut Rng) -> ComplexMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_inner(q)
}

/// `U_1 ⊗ ... ⊗ U_n` with independent Haar factors.
pub fn random_local_unitary(dims: &Dims, rng: &mut Rng) -> ComplexMatrix {
    let mut u = ComplexMatrix::identity(1);
    for &d in dims.as_slice() {
        u = tensor_product(&u, &random_unitary(d, rng)).expect("within dims limit");
    }
    u
}

/// Draws a random pure state on `dims` through `rng`.
pub fn random_pure_state_from(dims: &Dims, rng: &mut Rng) -> StateVector {
    unit_vector(dims.total(), rng)
}

pub fn computational_basis_state(dims: &Dims, index: usize) -> Result<DensityOperator> {
    let mut v = StateVector::from_element(dims.total(), ZERO);
    if index >= v.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), found: index });
    }
    v[index] = ONE;
    DensityOperator::from_pure(&v, dims.clone())
}

//! Dense complex linear algebra on multipartite Hilbert spaces.
//!
//! Subsystems are indexed from 0 and laid out row-major: the leftmost
//! factor of a tensor product is the most significant digit of a flat
//! basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest total Hilbert-space dimension accepted by constructors.
pub const MAX_DIMENSION: usize = 4096;

/// Hermiticity tolerance (max entry of `m - m†`).
pub const HERMITIAN_TOL: f64 = 1e-9;

pub type StateVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        ComplexMatrix(m)
    }

    /// `|psi><psi|`
    pub fn projector(psi: &StateVector) -> Self {
        ComplexMatrix(psi * psi.adjoint())
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Self {
        ComplexMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.0[(r, c)] = v;
    }

    pub fn row_major_entries(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 * &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(&self.0 * Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 - &other.0)
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Complex64 {
        let n = self.rows();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    /// Largest entry modulus of `self - self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.rows();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `<v| self |v>`
    pub fn expectation(&self, v: &StateVector) -> Complex64 {
        v.dotc(&(&self.0 * v))
    }

    /// `(self + self†)/2`
    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }
}

/// Local dimensions of an n-partite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("at least one subsystem required".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_DIMENSION)
                .ok_or(Error::Oversized {
                    dim: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                    max: MAX_DIMENSION,
                })?;
        }
        Ok(Dims(dims))
    }

    pub fn qubits(n: usize) -> Self {
        Dims::new(vec![2; n]).expect("qubit register within size limits")
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn local(&self, k: usize) -> usize {
        self.0[k]
    }

    /// Row-major strides: stride of party k is the product of dims to its right.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.0[k + 1];
        }
        s
    }

    pub fn select(&self, parties: &[usize]) -> Vec<usize> {
        parties.iter().map(|&k| self.0[k]).collect()
    }

    pub fn product_of(&self, parties: &[usize]) -> usize {
        parties.iter().map(|&k| self.0[k]).product()
    }

    fn check_operator(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found: m.rows(),
            });
        }
        Ok(())
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        let n = self.parties();
        let mut seen = vec![false; n];
        for &k in idx {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, parties: n });
            }
            if seen[k] {
                return Err(Error::InvalidPartition(format!("subsystem {k} listed twice")));
            }
            seen[k] = true;
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Dims {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Dims::new(v)
    }
}

impl From<Dims> for Vec<usize> {
    fn from(d: Dims) -> Self {
        d.0
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn flatten(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DIMENSION && c <= MAX_DIMENSION => {
            Ok(ComplexMatrix(a.0.kronecker(&b.0)))
        }
        _ => Err(Error::Oversized {
            dim: a.rows().saturating_mul(b.rows()).max(a.cols().saturating_mul(b.cols())),
            max: MAX_DIMENSION,
        }),
    }
}

pub fn kron_vec(a: &StateVector, b: &StateVector) -> StateVector {
    a.kronecker(b)
}

/// Traces out every subsystem not listed in `keep`; the result is ordered
/// by increasing party index.
pub fn partial_trace(m: &ComplexMatrix, dims: &Dims, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    dims.check_indices(keep)?;
    if keep.is_empty() {
        return Err(Error::InvalidPartition("partial trace must keep at least one subsystem".into()));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    let n = dims.parties();
    let traced: Vec<usize> = (0..n).filter(|k| !keep_sorted.contains(k)).collect();
    let kd = dims.select(&keep_sorted);
    let td = dims.select(&traced);
    let dk: usize = kd.iter().product();
    let dt: usize = td.iter().product();
    let strides = dims.strides();

    // offset of a (kept, traced) digit pair in the full index
    let offset = |parties: &[usize], local: &[usize], flat: usize| -> usize {
        let mut dg = vec![0; local.len()];
        digits(flat, local, &mut dg);
        parties.iter().zip(&dg).map(|(&p, &i)| i * strides[p]).sum()
    };
    let keep_off: Vec<usize> = (0..dk).map(|i| offset(&keep_sorted, &kd, i)).collect();
    let trace_off: Vec<usize> = (0..dt).map(|i| offset(&traced, &td, i)).collect();

    let mut out = DMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in 0..dk {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += m.0[(keep_off[r] + t, keep_off[c] + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(ComplexMatrix(out))
}

/// Transposes the indices of the listed subsystems.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &Dims,
    transposed: &[usize],
) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    dims.check_indices(transposed)?;
    let d = dims.total();
    let local = dims.as_slice();
    let n = local.len();
    let mut mask = vec![false; n];
    for &k in transposed {
        mask[k] = true;
    }
    let mut rd = vec![0; n];
    let mut cd = vec![0; n];
    let mut out = DMatrix::zeros(d, d);
    for r in 0..d {
        digits(r, local, &mut rd);
        for c in 0..d {
            digits(c, local, &mut cd);
            let mut nr = rd.clone();
            let mut nc = cd.clone();
            for k in 0..n {
                if mask[k] {
                    nr[k] = cd[k];
                    nc[k] = rd[k];
                }
            }
            out[(flatten(&nr, local), flatten(&nc, local))] = m.0[(r, c)];
        }
    }
    Ok(ComplexMatrix(out))
}

/// Index map taking a flat index in `perm` order back to canonical order.
///
/// `perm[j]` is the canonical party placed at position `j` of the new layout.
pub fn permutation_map(dims: &Dims, perm: &[usize]) -> Result<Vec<usize>> {
    dims.check_indices(perm)?;
    if perm.len() != dims.parties() {
        return Err(Error::InvalidPartition("permutation must list every party".into()));
    }
    let new_dims = dims.select(perm);
    let strides = dims.strides();
    let total = dims.total();
    let mut dg = vec![0; perm.len()];
    Ok((0..total)
        .map(|idx| {
            digits(idx, &new_dims, &mut dg);
            perm.iter().zip(&dg).map(|(&p, &i)| i * strides[p]).sum()
        })
        .collect())
}

/// Reorders the tensor factors of an operator: factor `j` of the result is
/// canonical party `perm[j]`.
pub fn permute_subsystems(m: &ComplexMatrix, dims: &Dims, perm: &[usize]) -> Result<ComplexMatrix> {
    dims.check_operator(m)?;
    let map = permutation_map(dims, perm)?;
    let d = map.len();
    let mut out = DMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            out[(r, c)] = m.0[(map[r], map[c])];
        }
    }
    Ok(ComplexMatrix(out))
}

pub fn permute_vector(v: &StateVector, dims: &Dims, perm: &[usize]) -> Result<StateVector> {
    let map = permutation_map(dims, perm)?;
    if v.len() != map.len() {
        return Err(Error::DimensionMismatch {
            expected: map.len(),
            found: v.len(),
        });
    }
    Ok(StateVector::from_iterator(map.len(), map.iter().map(|&i| v[i])))
}

/// Eigenvalues in increasing order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigensystem {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, i: usize) -> StateVector {
        self.vectors.column(i).into_owned()
    }
}

/// Full spectral decomposition of a Hermitian matrix.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows();
    let sym = m.hermitian_part();
    let eig = nalgebra::SymmetricEigen::try_new(sym.0, f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::NumericalBreakdown("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalBreakdown("non-finite eigenvalue".into()));
    }
    let mut vectors = DMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok(Eigensystem { values, vectors })
}

pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(m)?.values)
}

/// Schmidt form of a bipartite pure state.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Decreasing, nonnegative.
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<StateVector>,
    pub right_vectors: Vec<StateVector>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> StateVector {
        let da = self.left_vectors[0].len();
        let db = self.right_vectors[0].len();
        let mut v = StateVector::zeros(da * db);
        for ((a, u), w) in self.coefficients.iter().zip(&self.left_vectors).zip(&self.right_vectors) {
            v += kron_vec(u, w) * Complex64::new(*a, 0.0);
        }
        v
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&a| a > tol).count()
    }
}

/// Schmidt decomposition via the SVD of the `d_A × d_B` amplitude matrix.
pub fn schmidt_decompose(psi: &StateVector, dims: &Dims) -> Result<SchmidtDecomposition> {
    if dims.parties() != 2 {
        return Err(Error::WrongPartyCount {
            expected: 2,
            found: dims.parties(),
        });
    }
    if psi.len() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: psi.len(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    let (da, db) = (dims.local(0), dims.local(1));
    let amp = DMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
    let svd = nalgebra::SVD::try_new(amp, true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalBreakdown("SVD did not converge".into()))?;
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
    // amp = U Σ V†, so the right vectors are the conjugated rows of V†
    let left_vectors = order.iter().map(|&i| u.column(i).into_owned()).collect();
    let right_vectors = order
        .iter()
        .map(|&i| vt.row(i).transpose())
        .collect();
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors,
        right_vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, &[ZERO, ONE, ONE, ZERO]).unwrap()
    }

    fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap()
    }

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_vec(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)])
    }

    #[test]
    fn identity_tensor_identity() {
        let i4 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn projector_tensor_single_entry() {
        let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let m = tensor_product(&p0, &p1).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == 1 && col == 1 { ONE } else { ZERO };
                assert_eq!(m.get(r, col), want);
            }
        }
    }

    #[test]
    fn pauli_tensor_matches_index_formula() {
        let (x, y) = (pauli_x(), pauli_y());
        let m = tensor_product(&x, &y).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        assert_eq!(m.get(i * 2 + k, j * 2 + l), x.get(i, j) * y.get(k, l));
                    }
                }
            }
        }
    }

    #[test]
    fn oversized_product_rejected() {
        let a = ComplexMatrix::identity(128);
        assert!(matches!(tensor_product(&a, &a), Err(Error::Oversized { .. })));
        assert!(Dims::new(vec![64, 128]).is_err());
        assert!(Dims::new(vec![1, 2]).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = ComplexMatrix::projector(&bell());
        let dims = Dims::qubits(2);
        let ra = partial_trace(&rho, &dims, &[0]).unwrap();
        assert!(ra.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_row_major(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
        let b = ComplexMatrix::from_real_diagonal(&[0.2, 0.5, 0.3]);
        let ab = tensor_product(&a, &b).unwrap();
        let dims = Dims::new(vec![2, 3]).unwrap();
        assert!(partial_trace(&ab, &dims, &[0]).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, &dims, &[1]).unwrap().max_abs_diff(&b.scale(1.0)) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let dims = Dims::qubits(2);
        let m = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&m, &dims, &[2]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(
            partial_trace(&ComplexMatrix::identity(3), &dims, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(partial_transpose(&m, &dims, &[5]).is_err());
    }

    #[test]
    fn bell_partial_transpose_spectrum() {
        let rho = ComplexMatrix::projector(&bell());
        let pt = partial_transpose(&rho, &Dims::qubits(2), &[0]).unwrap();
        let ev = eigenvalues(&pt).unwrap();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn full_partial_transpose_is_transpose() {
        let dims = Dims::new(vec![2, 3]).unwrap();
        let entries: Vec<Complex64> = (0..36).map(|i| c(i as f64, (i * i % 7) as f64)).collect();
        let m = ComplexMatrix::from_row_major(6, 6, &entries).unwrap();
        assert_eq!(partial_transpose(&m, &dims, &[0, 1]).unwrap(), m.transpose());
        let twice = partial_transpose(&partial_transpose(&m, &dims, &[1]).unwrap(), &dims, &[1]).unwrap();
        assert_eq!(twice, m);
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let ev = eigenvalues(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(ev, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x_eigenvectors() {
        let es = hermitian_eigensystem(&pauli_x()).unwrap();
        assert!((es.values[0] + 1.0).abs() < 1e-14 && (es.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = es.vector(0);
        // equal to (|0> - |1>)/sqrt2 up to phase
        let overlap = minus.dotc(&StateVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]));
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_row_major(2, 2, &[ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn schmidt_examples() {
        let dims = Dims::qubits(2);
        let prod = StateVector::from_vec(vec![ONE, ZERO, ZERO, ZERO]);
        let s = schmidt_decompose(&prod, &dims).unwrap();
        assert!((s.coefficients[0] - 1.0).abs() < 1e-14 && s.coefficients[1].abs() < 1e-14);

        let s = schmidt_decompose(&bell(), &dims).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.coefficients[0] - h).abs() < 1e-14 && (s.coefficients[1] - h).abs() < 1e-14);

        let v = StateVector::from_vec(vec![c(0.8f64.sqrt(), 0.0), ZERO, ZERO, c(0.2f64.sqrt(), 0.0)]);
        let s = schmidt_decompose(&v, &dims).unwrap();
        assert!((s.coefficients[0] - 0.8f64.sqrt()).abs() < 1e-14);
        assert!((s.coefficients[1] - 0.2f64.sqrt()).abs() < 1e-14);
        assert!((s.reconstruct() - v).norm() < 1e-12);
    }

    #[test]
    fn schmidt_errors() {
        let v = StateVector::from_vec(vec![ONE, ONE, ZERO, ZERO]);
        assert!(matches!(
            schmidt_decompose(&v, &Dims::qubits(2)),
            Err(Error::NotNormalized { .. })
        ));
        let w = StateVector::from_element(8, c(8f64.sqrt().recip(), 0.0));
        assert!(matches!(
            schmidt_decompose(&w, &Dims::qubits(3)),
            Err(Error::WrongPartyCount { .. })
        ));
    }

    #[test]
    fn permute_swaps_factors() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diagonal(&[3.0, 4.0, 5.0]);
        let ab = tensor_product(&a, &b).unwrap();
        let ba = tensor_product(&b, &a).unwrap();
        let dims = Dims::new(vec![2, 3]).unwrap();
        assert_eq!(permute_subsystems(&ab, &dims, &[1, 0]).unwrap(), ba);
    }
}

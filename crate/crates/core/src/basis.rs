//! Orthonormal Hermitian operator basis (generalized Gell-Mann matrices).
//!
//! Index 0 is `I/√D`, indices `1..D` the traceless diagonal elements, and the
//! remaining `D(D-1)` entries alternate symmetric / antisymmetric
//! off-diagonal elements for each pair `j < k`.

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, StateVector};

#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    /// `1/√(l(l+1))` for diagonal element `l`.
    diag_scale: Vec<f64>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 2, "Hermitian basis needs D >= 2");
        let diag_scale = (0..dim)
            .map(|l| if l == 0 { 0.0 } else { 1.0 / ((l * (l + 1)) as f64).sqrt() })
            .collect();
        HermitianBasis { dim, diag_scale }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `D²`.
    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn pair_index(&self, j: usize, k: usize) -> usize {
        // position of (j, k), j < k, in row-major upper-triangle order
        let d = self.dim;
        j * (2 * d - j - 1) / 2 + (k - j - 1)
    }

    /// Real coordinates `Tr(B_i H)` of a Hermitian matrix.
    pub fn coordinates(&self, h: &ComplexMatrix) -> Vec<f64> {
        let d = self.dim;
        let mut x = vec![0.0; d * d];
        let diag: Vec<f64> = (0..d).map(|i| h.get(i, i).re).collect();
        self.fill_diagonal(&diag, &mut x);
        let s2 = std::f64::consts::SQRT_2;
        for j in 0..d {
            for k in j + 1..d {
                let p = d + 2 * self.pair_index(j, k);
                let z = h.get(j, k);
                x[p] = s2 * z.re;
                x[p + 1] = -s2 * z.im;
            }
        }
        x
    }

    fn fill_diagonal(&self, diag: &[f64], x: &mut [f64]) {
        let d = self.dim;
        x[0] = diag.iter().sum::<f64>() / (d as f64).sqrt();
        let mut prefix = 0.0;
        for l in 1..d {
            prefix += diag[l - 1];
            x[l] = (prefix - l as f64 * diag[l]) * self.diag_scale[l];
        }
    }

    /// Coordinates of `|ψ⟩⟨ψ|`, i.e. `⟨ψ|B_i|ψ⟩` for every basis element.
    pub fn quadratic_row(&self, psi: &StateVector) -> Vec<f64> {
        let d = self.dim;
        let mut x = vec![0.0; d * d];
        let diag: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        self.fill_diagonal(&diag, &mut x);
        let s2 = std::f64::consts::SQRT_2;
        let mut p = d;
        for j in 0..d {
            let cj = psi[j];
            for k in j + 1..d {
                let z = cj * psi[k].conj();
                x[p] = s2 * z.re;
                x[p + 1] = -s2 * z.im;
                p += 2;
            }
        }
        x
    }

    /// `Σ x_i B_i`
    pub fn assemble(&self, x: &[f64]) -> ComplexMatrix {
        let d = self.dim;
        assert_eq!(x.len(), d * d, "coordinate vector length");
        let mut m = ComplexMatrix::zeros(d, d);
        let base = x[0] / (d as f64).sqrt();
        let mut diag = vec![base; d];
        for l in 1..d {
            let s = x[l] * self.diag_scale[l];
            for v in diag.iter_mut().take(l) {
                *v += s;
            }
            diag[l] -= l as f64 * s;
        }
        for (i, v) in diag.into_iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut p = d;
        for j in 0..d {
            for k in j + 1..d {
                let z = Complex64::new(x[p] * r2, -x[p + 1] * r2);
                m.set(j, k, z);
                m.set(k, j, z.conj());
                p += 2;
            }
        }
        m
    }

    /// Explicit basis matrices.
    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        (0..self.len())
            .map(|i| {
                let mut e = vec![0.0; self.len()];
                e[i] = 1.0;
                self.assemble(&e)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, rng};

    fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
        let mut r = rng(seed);
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, complex_gaussian(&mut r));
            }
        }
        m.hermitian_part()
    }

    #[test]
    fn qubit_basis_is_identity_and_paulis() {
        let b = HermitianBasis::new(2).matrices();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re * h, im * h);
        let z0 = Complex64::new(0.0, 0.0);
        let expect = [
            [c(1.0, 0.0), z0, z0, c(1.0, 0.0)],
            [c(1.0, 0.0), z0, z0, c(-1.0, 0.0)],
            [z0, c(1.0, 0.0), c(1.0, 0.0), z0],
            [z0, c(0.0, -1.0), c(0.0, 1.0), z0],
        ];
        for (m, e) in b.iter().zip(expect) {
            assert!(m.max_abs_diff(&ComplexMatrix::from_row_major(2, 2, &e).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn orthonormal() {
        for d in [2, 3, 4, 6] {
            let b = HermitianBasis::new(d).matrices();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let ip = b[i].trace_product(&b[j]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.re - want).abs() < 1e-12 && ip.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_coordinates_match_traces() {
        for d in [2, 3, 5, 8] {
            let basis = HermitianBasis::new(d);
            let h = random_hermitian(d, d as u64);
            let x = basis.coordinates(&h);
            assert!(basis.assemble(&x).max_abs_diff(&h) < 1e-10);
            for (xi, bi) in x.iter().zip(basis.matrices()) {
                assert!((bi.trace_product(&h).re - xi).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadratic_row_matches_projector_coordinates() {
        let basis = HermitianBasis::new(6);
        let psi = crate::rng::unit_vector(6, &mut rng(3));
        let a = basis.quadratic_row(&psi);
        let b = basis.coordinates(&ComplexMatrix::projector(&psi));
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).abs() < 1e-14);
        }
    }
}

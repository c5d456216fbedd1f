//! JSON state files: `{"dims": [..], "label": "..", "matrix": [[[re, im], ..], ..]}`.

use std::path::Path;

use entwit_core::linalg::ComplexMatrix;
use entwit_core::states::validate;
use entwit_core::{DensityOperator, Dims, Witness};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Row-major entries as `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_matrix(m: &ComplexMatrix, dims: &Dims, label: Option<String>) -> Self {
        let matrix = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c)).map(|z| [z.re, z.im]).collect())
            .collect();
        StateFile {
            dims: dims.as_slice().to_vec(),
            label,
            matrix,
        }
    }

    pub fn to_matrix(&self) -> Result<(ComplexMatrix, Dims), CliError> {
        let dims = Dims::new(self.dims.clone())?;
        let d = dims.total();
        if self.matrix.len() != d || self.matrix.iter().any(|row| row.len() != d) {
            return Err(CliError::invalid(format!(
                "matrix must be {d}x{d} for dims {dims}"
            )));
        }
        let entries: Vec<Complex64> = self
            .matrix
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Ok((ComplexMatrix::from_row_major(d, d, &entries)?, dims))
    }

    pub fn to_state(&self) -> Result<DensityOperator, CliError> {
        let (m, dims) = self.to_matrix()?;
        Ok(validate(m, dims)?)
    }

    pub fn to_witness(&self) -> Result<Witness, CliError> {
        let (m, dims) = self.to_matrix()?;
        Ok(Witness::new(m, dims)?)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string(self).map_err(CliError::internal)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use entwit_core::states::{bell_state, random_mixed_state};

    #[test]
    fn parses_spec_layout() {
        let text = r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
        let f: StateFile = serde_json::from_str(text).unwrap();
        let rho = f.to_state().unwrap();
        assert_eq!(rho.dims().as_slice(), &[2]);
        assert_eq!(f.label, None);
    }

    #[test]
    fn bit_exact_round_trip() {
        let mut r = entwit_core::rng::rng(5);
        for dims in [Dims::qubits(2), Dims::new(vec![2, 3]).unwrap(), Dims::qubits(3)] {
            let rho = random_mixed_state(&dims, &mut r);
            let f = StateFile::from_matrix(rho.matrix(), &dims, Some("x".into()));
            let text = serde_json::to_string(&f).unwrap();
            let back: StateFile = serde_json::from_str(&text).unwrap();
            let (m, d) = back.to_matrix().unwrap();
            assert_eq!(d, dims);
            for (a, b) in m.row_major_entries().iter().zip(rho.matrix().row_major_entries()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut f = StateFile::from_matrix(bell_state().matrix(), &Dims::qubits(2), None);
        f.matrix.pop();
        assert!(f.to_matrix().is_err());
        f.dims = vec![2, 3];
        assert!(f.to_matrix().is_err());
        let text = r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0],[0,0]]],"extra":1}"#;
        assert!(serde_json::from_str::<StateFile>(text).is_err());
    }
}

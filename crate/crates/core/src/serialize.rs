//! Shared JSON wire format for operators and kets:
//! `{ "dim": d, "re": [...], "im": [...] }` with row-major entries.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::{CMat, CVec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl OperatorJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let dim = m.nrows();
        let mut re = Vec::with_capacity(dim * dim);
        let mut im = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..m.ncols() {
                re.push(m[[i, j]].re);
                im.push(m[[i, j]].im);
            }
        }
        OperatorJson { dim, re, im }
    }

    pub fn from_vector(v: &CVec) -> Self {
        OperatorJson {
            dim: v.len(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat, CoreError> {
        let d = self.dim;
        if self.re.len() != d * d || self.im.len() != d * d {
            return Err(CoreError::Serialization(format!(
                "matrix payload length {} does not match dim {}",
                self.re.len(),
                d
            )));
        }
        let mut m: CMat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                m[[i, j]] = Complex64::new(self.re[k], self.im[k]);
            }
        }
        Ok(m)
    }

    pub fn to_vector(&self) -> Result<CVec, CoreError> {
        let d = self.dim;
        if self.re.len() != d || self.im.len() != d {
            return Err(CoreError::Serialization(format!(
                "vector payload length {} does not match dim {}",
                self.re.len(),
                d
            )));
        }
        Ok(Array1::from_iter(
            (0..d).map(|k| Complex64::new(self.re[k], self.im[k])),
        ))
    }
}

pub fn matrix_to_json(m: &CMat) -> String {
    serde_json::to_string(&OperatorJson::from_matrix(m)).expect("serialize matrix")
}

pub fn matrix_from_json(s: &str) -> Result<CMat, CoreError> {
    let parsed: OperatorJson =
        serde_json::from_str(s).map_err(|e| CoreError::Serialization(e.to_string()))?;
    parsed.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn matrix_round_trip(seed in 0u64..1000) {
            let u = crate::random::haar_random_unitary(5, seed).unwrap();
            let s = matrix_to_json(u.entries());
            let back = matrix_from_json(&s).unwrap();
            let err = crate::linalg::frobenius_norm(&(&back - u.entries()));
            prop_assert!(err == 0.0);
        }
    }
}

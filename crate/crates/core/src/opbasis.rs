//! Orthonormal Hermitian operator basis: the identity over sqrt(d) followed
//! by the normalized generalized Gell-Mann matrices (symmetric pair terms,
//! antisymmetric pair terms, then diagonal terms). Fixes the meaning of
//! process-matrix entries and of vectorized-operator coefficients.

use ndarray::Array2;
use num_complex::Complex64;

use crate::CMat;

/// The d^2 basis operators, Tr(U_a^dag U_b) = delta_ab, U_0 = I/sqrt(d).
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::with_capacity(d * d);
    let mut eye: CMat = Array2::eye(d);
    let norm = 1.0 / (d as f64).sqrt();
    eye.mapv_inplace(|z| z * norm);
    out.push(eye);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            let mut x: CMat = Array2::zeros((d, d));
            x[[j, k]] = Complex64::new(s, 0.0);
            x[[k, j]] = Complex64::new(s, 0.0);
            out.push(x);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut y: CMat = Array2::zeros((d, d));
            y[[j, k]] = Complex64::new(0.0, -s);
            y[[k, j]] = Complex64::new(0.0, s);
            out.push(y);
        }
    }
    for l in 1..d {
        let mut m: CMat = Array2::zeros((d, d));
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        for i in 0..l {
            m[[i, i]] = Complex64::new(norm, 0.0);
        }
        m[[l, l]] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(m);
    }
    out
}

/// Real coefficient vector of a Hermitian matrix in the basis.
pub fn to_coefficients(m: &CMat, basis: &[CMat]) -> Vec<f64> {
    basis
        .iter()
        .map(|u| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    acc += u[[j, i]].conj() * m[[j, i]];
                }
            }
            acc.re
        })
        .collect()
}

/// Reassemble a Hermitian matrix from its coefficients.
pub fn from_coefficients(coeffs: &[f64], basis: &[CMat]) -> CMat {
    let d = basis[0].nrows();
    let mut m: CMat = Array2::zeros((d, d));
    for (c, u) in coeffs.iter().zip(basis.iter()) {
        m = &m + &u.mapv(|z| z * *c);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, trace};

    #[test]
    fn orthonormal_and_complete() {
        for d in [2usize, 3, 4] {
            let basis = hermitian_basis(d);
            assert_eq!(basis.len(), d * d);
            for (a, ua) in basis.iter().enumerate() {
                // Hermitian.
                assert!(crate::linalg::hermiticity_error(ua) < 1e-15);
                for (b, ub) in basis.iter().enumerate() {
                    let ip = trace(&crate::linalg::dagger(ua).dot(ub));
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (ip - Complex64::new(want, 0.0)).norm() < 1e-13,
                        "({a},{b}) inner product {ip}"
                    );
                }
            }
        }
    }

    #[test]
    fn round_trip() {
        let d = 4;
        let basis = hermitian_basis(d);
        let u = crate::random::haar_random_unitary(d, 5).unwrap();
        let h = {
            let m = u.entries();
            let md = crate::linalg::dagger(m);
            (&(m + &md)).mapv(|z| 0.5 * z)
        };
        let coeffs = to_coefficients(&h, &basis);
        let back = from_coefficients(&coeffs, &basis);
        assert!(frobenius_norm(&(&back - &h)) < 1e-12);
    }
}

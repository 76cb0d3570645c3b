//! Measurement bases from discrete orthogonal polynomial recurrences.
//!
//! Two polynomial families on the grid {0, ..., d-1} (uniform weight, the
//! discrete Chebyshev family, and binomial weight, the Krawtchouk family)
//! give two real Jacobi matrices through their three-term recurrences. The
//! four bases are the eigenbases of those Jacobi matrices and of their
//! i-twisted conjugates diag(i^n) J diag(i^n)^dag, which probe the real and
//! imaginary parts of neighbor coherences. With the logical basis prepended
//! (count = 5) the set is verified rank-1 strictly complete; the four
//! superposition bases alone (count = 4) are rank-1 complete away from the
//! measure-zero failure set.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::eigh;
use qudit_core::CMat;

use crate::construction::{IcClass, PovmConstruction};
use crate::PovmError;

/// Jacobi (tridiagonal recurrence) matrix of the orthonormal polynomials of
/// the discrete measure {(x_j, w_j)}, computed by the Stieltjes process.
fn jacobi_matrix(points: &[f64], weights: &[f64], dim: usize) -> CMat {
    let n = points.len();
    let mut alpha = vec![0.0f64; dim];
    let mut beta = vec![0.0f64; dim];
    // p_{-1} = 0, p_0 = 1/||1||.
    let norm0: f64 = weights.iter().sum::<f64>().sqrt();
    let mut p_prev = vec![0.0f64; n];
    let mut p_cur: Vec<f64> = weights.iter().map(|_| 1.0 / norm0).collect();
    for k in 0..dim {
        // alpha_k = <x p_k, p_k>.
        alpha[k] = (0..n).map(|j| weights[j] * points[j] * p_cur[j] * p_cur[j]).sum();
        if k + 1 == dim {
            break;
        }
        // r = x p_k - alpha_k p_k - beta_{k-1} p_{k-1}.
        let mut r = vec![0.0f64; n];
        for j in 0..n {
            r[j] = points[j] * p_cur[j] - alpha[k] * p_cur[j];
            if k > 0 {
                r[j] -= beta[k - 1] * p_prev[j];
            }
        }
        let nr: f64 = (0..n).map(|j| weights[j] * r[j] * r[j]).sum::<f64>().sqrt();
        beta[k] = nr;
        for item in r.iter_mut() {
            *item /= nr;
        }
        p_prev = std::mem::replace(&mut p_cur, r);
    }
    let mut jm: CMat = Array2::zeros((dim, dim));
    for k in 0..dim {
        jm[[k, k]] = Complex64::new(alpha[k], 0.0);
        if k + 1 < dim {
            jm[[k, k + 1]] = Complex64::new(beta[k], 0.0);
            jm[[k + 1, k]] = Complex64::new(beta[k], 0.0);
        }
    }
    jm
}

fn binomial_weights(d: usize) -> Vec<f64> {
    let mut w = vec![1.0f64; d];
    for j in 1..d {
        w[j] = w[j - 1] * (d - j) as f64 / j as f64;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

fn eigenbasis(m: &CMat) -> Result<CMat, PovmError> {
    Ok(eigh(m)?.vectors)
}

fn twist(dim: usize) -> CMat {
    let mut t: CMat = Array2::zeros((dim, dim));
    for n in 0..dim {
        t[[n, n]] = Complex64::i().powu(n as u32);
    }
    t
}

/// Polynomial basis construction with `count` in {4, 5}.
pub fn polynomial_bases(d: usize, count: usize) -> Result<PovmConstruction, PovmError> {
    if d < 2 {
        return Err(PovmError::UnsupportedDimension(format!("need d >= 2, got {d}")));
    }
    if count != 4 && count != 5 {
        return Err(PovmError::UnsupportedDimension(format!(
            "polynomial basis count must be 4 or 5, got {count}"
        )));
    }
    let points: Vec<f64> = (0..d).map(|j| j as f64).collect();
    let uniform = vec![1.0 / d as f64; d];
    let binom = binomial_weights(d);
    let j_cheb = jacobi_matrix(&points, &uniform, d);
    let j_kraw = jacobi_matrix(&points, &binom, d);
    let t = twist(d);
    let th = qudit_core::linalg::dagger(&t);
    let b1 = eigenbasis(&j_cheb)?;
    let b2 = eigenbasis(&j_kraw)?;
    let b3 = eigenbasis(&t.dot(&j_cheb).dot(&th))?;
    let b4 = eigenbasis(&t.dot(&j_kraw).dot(&th))?;

    let (bases, class, name): (Vec<CMat>, IcClass, String) = if count == 5 {
        (
            vec![Array2::eye(d), b1, b2, b3, b4],
            IcClass::Rank1Strict,
            format!("5PB{d}"),
        )
    } else {
        (vec![b1, b2, b3, b4], IcClass::Rank1, format!("4PB{d}"))
    };
    Ok(PovmConstruction::from_bases(name, class, &bases))
}

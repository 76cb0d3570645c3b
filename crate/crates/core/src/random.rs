//! Seeded Haar-random unitaries and states.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::CoreError;
use crate::linalg::qr_unitary;
use crate::operator::{Ket, QuditOperator};
use crate::CMat;

/// Standard normal via Box-Muller, to stay independent of distribution crates.
pub fn randn(rng: &mut impl Rng) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(d: usize, rng: &mut impl Rng) -> CMat {
    let mut a: CMat = Array2::zeros((d, d));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in 0..d {
            a[[i, j]] = Complex64::new(randn(rng) * s, randn(rng) * s);
        }
    }
    a
}

/// Haar-distributed unitary from QR of a Ginibre matrix with the R-diagonal
/// phase fix; deterministic per seed.
pub fn haar_random_unitary(d: usize, seed: u64) -> Result<QuditOperator, CoreError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    haar_unitary_with_rng(d, &mut rng)
}

pub fn haar_unitary_with_rng(d: usize, rng: &mut impl Rng) -> Result<QuditOperator, CoreError> {
    if d == 0 {
        return Err(CoreError::arg("haar_random_unitary: d must be >= 1"));
    }
    let a = ginibre(d, rng);
    let (q, rdiag) = qr_unitary(&a);
    let mut u = q;
    for j in 0..d {
        let r = rdiag[j];
        let phase = if r.norm() > 0.0 { r / r.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            u[[i, j]] *= phase;
        }
    }
    QuditOperator::unitary(u)
}

/// Haar-random pure state: first column of a Haar unitary.
pub fn haar_random_state(d: usize, seed: u64) -> Result<Ket, CoreError> {
    let u = haar_random_unitary(d, seed)?;
    let col = Array1::from_iter((0..d).map(|i| u.entries()[[i, 0]]));
    Ket::normalized(col)
}

pub fn haar_state_with_rng(d: usize, rng: &mut impl Rng) -> Result<Ket, CoreError> {
    let u = haar_unitary_with_rng(d, rng)?;
    let col = Array1::from_iter((0..d).map(|i| u.entries()[[i, 0]]));
    Ket::normalized(col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, frobenius_norm, trace};
    use ndarray::Array2;

    #[test]
    fn d1_is_phase() {
        let u = haar_random_unitary(1, 0).unwrap();
        assert!((u.entries()[[0, 0]].norm() - 1.0).abs() < 1e-12);
        let k = haar_random_state(1, 3).unwrap();
        assert!((k.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitarity_and_determinism() {
        let u1 = haar_random_unitary(16, 1234).unwrap();
        let u2 = haar_random_unitary(16, 1234).unwrap();
        assert!(frobenius_norm(&(u1.entries() - u2.entries())) == 0.0);
        let g = dagger(u1.entries()).dot(u1.entries());
        assert!(frobenius_norm(&(&g - &crate::linalg::identity(16))) < 1e-10);
    }

    #[test]
    fn haar_trace_moment() {
        // E |Tr U|^2 = 1 for the Haar measure; mean of |Tr U|^2/4 over
        // d = 2 samples approaches 0.25.
        let n = 10_000;
        let mut acc = 0.0;
        for seed in 0..n {
            let u = haar_random_unitary(2, seed).unwrap();
            acc += trace(u.entries()).norm_sqr() / 4.0;
        }
        let mean = acc / n as f64;
        assert!((mean - 0.25).abs() < 0.02, "mean = {mean}");
    }

    #[test]
    fn haar_state_moment() {
        // E |<0|psi>|^2 = 1/d for Haar states.
        let n = 10_000;
        let d = 4;
        let mut acc = 0.0;
        for seed in 0..n {
            let k = haar_random_state(d, seed).unwrap();
            acc += k.amplitudes()[0].norm_sqr();
        }
        let mean = acc / n as f64;
        assert!((mean - 0.25).abs() < 0.02, "mean = {mean}");
    }
}

//! Fidelity functionals for states, unitaries, subspace maps and isometries.
//!
//! All fidelities clamp values inside +-1e-9 of the [0,1] boundary to the
//! boundary; larger violations surface as errors rather than being hidden.

use crate::error::CoreError;
use crate::linalg::{self, eigh};
use crate::operator::QuditOperator;
use crate::CMat;

const CLAMP_BAND: f64 = 1e-9;

fn clamp_unit(x: f64, what: &str) -> Result<f64, CoreError> {
    if x < -CLAMP_BAND || x > 1.0 + CLAMP_BAND {
        return Err(CoreError::numerical(format!(
            "{what} = {x} outside [0,1] beyond tolerance"
        )));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Uhlmann fidelity Tr sqrt(sqrt(rho_e) rho sqrt(rho_e)) between two density
/// operators. For pure rho this reduces to sqrt(<psi|rho_e|psi>).
pub fn state_fidelity(rho_e: &QuditOperator, rho: &QuditOperator) -> Result<f64, CoreError> {
    if rho_e.dim() != rho.dim() {
        return Err(CoreError::dim(format!(
            "state_fidelity dims {} vs {}",
            rho_e.dim(),
            rho.dim()
        )));
    }
    state_fidelity_mat(rho_e.entries(), rho.entries())
}

/// Raw-matrix Uhlmann fidelity. Inputs must be Hermitian PSD within -1e-6
/// eigenvalue floor; small negative eigenvalues are floored at zero.
pub fn state_fidelity_mat(rho_e: &CMat, rho: &CMat) -> Result<f64, CoreError> {
    if rho_e.nrows() != rho.nrows() {
        return Err(CoreError::dim("state_fidelity dims differ"));
    }
    for (name, m) in [("rho_e", rho_e), ("rho", rho)] {
        let dec = eigh(m)?;
        let min = dec.values.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-6 {
            return Err(CoreError::invariant(format!(
                "{name} is not PSD (min eigenvalue {min:.3e})"
            )));
        }
    }
    let s = linalg::sqrtm_psd(rho_e)?;
    let m = s.dot(rho).dot(&s);
    let dec = eigh(&m)?;
    // Floor eigenvalues that are pure rounding noise; sqrt would otherwise
    // amplify O(eps) debris into O(sqrt(eps)) fidelity error.
    let top = dec.values.iter().cloned().fold(0.0f64, f64::max);
    let cut = 1e-13 * top.max(f64::MIN_POSITIVE);
    let f: f64 = dec
        .values
        .iter()
        .map(|&w| if w > cut { w.sqrt() } else { 0.0 })
        .sum();
    clamp_unit(f, "state fidelity")
}

/// |Tr(W^dag U)|^2 / d^2, insensitive to the global phase of either map.
pub fn unitary_fidelity(w: &QuditOperator, u: &QuditOperator) -> Result<f64, CoreError> {
    if w.dim() != u.dim() {
        return Err(CoreError::dim(format!("unitary_fidelity dims {} vs {}", w.dim(), u.dim())));
    }
    unitary_fidelity_mat(w.entries(), u.entries())
}

pub fn unitary_fidelity_mat(w: &CMat, u: &CMat) -> Result<f64, CoreError> {
    if w.nrows() != u.nrows() {
        return Err(CoreError::dim("unitary_fidelity dims differ"));
    }
    let d = w.nrows() as f64;
    let tr = linalg::trace(&linalg::dagger(w).dot(u));
    clamp_unit(tr.norm_sqr() / (d * d), "unitary fidelity")
}

/// |Tr(W^dag P U P)|^2 / ds^2 for a rank-ds projector P.
pub fn subspace_fidelity(
    w: &QuditOperator,
    u: &QuditOperator,
    p: &QuditOperator,
    ds: usize,
) -> Result<f64, CoreError> {
    let rank = p.projector_rank()?;
    if rank != ds {
        return Err(CoreError::arg(format!(
            "projector rank {rank} does not match ds = {ds}"
        )));
    }
    subspace_fidelity_mat(w.entries(), u.entries(), p.entries(), ds)
}

pub fn subspace_fidelity_mat(w: &CMat, u: &CMat, p: &CMat, ds: usize) -> Result<f64, CoreError> {
    let pup = p.dot(u).dot(p);
    let tr = linalg::trace(&linalg::dagger(w).dot(&pup));
    let k = ds as f64;
    clamp_unit(tr.norm_sqr() / (k * k), "subspace fidelity")
}

/// |Tr(Z^dag U Y)|^2 / ds^2 where Y and Z hold ds orthonormal columns
/// (initial and target state sets).
pub fn isometry_fidelity(z: &CMat, u: &QuditOperator, y: &CMat) -> Result<f64, CoreError> {
    isometry_fidelity_mat(z, u.entries(), y)
}

pub fn isometry_fidelity_mat(z: &CMat, u: &CMat, y: &CMat) -> Result<f64, CoreError> {
    let ds = y.ncols();
    if z.ncols() != ds {
        return Err(CoreError::dim(format!(
            "isometry column counts differ: {} vs {}",
            z.ncols(),
            ds
        )));
    }
    if z.nrows() != u.nrows() || y.nrows() != u.ncols() {
        return Err(CoreError::dim("isometry_fidelity shape mismatch"));
    }
    for (name, m) in [("Y", y), ("Z", z)] {
        let g = linalg::dagger(m).dot(m);
        let dev = linalg::frobenius_norm(&(&g - &crate::linalg::identity(ds)));
        if dev > 1e-8 {
            return Err(CoreError::invariant(format!(
                "{name} columns not orthonormal (deviation {dev:.3e})"
            )));
        }
    }
    let tr = linalg::trace(&linalg::dagger(z).dot(&u.dot(y)));
    let k = ds as f64;
    clamp_unit(tr.norm_sqr() / (k * k), "isometry fidelity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Ket;
    use crate::random::haar_random_unitary;
    use ndarray::{array, Array2};
    use num_complex::Complex64;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn self_fidelity_and_orthogonal() {
        let rho = QuditOperator::density(array![[ONE, ZERO], [ZERO, ZERO]]).unwrap();
        let sig = QuditOperator::density(array![[ZERO, ZERO], [ZERO, ONE]]).unwrap();
        assert!((state_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(state_fidelity(&rho, &sig).unwrap() < 1e-12);
    }

    #[test]
    fn mixed_vs_pure_closed_form() {
        // F(I/d, |psi><psi|) = 1/sqrt(d)
        let d = 5;
        let psi = crate::random::haar_random_state(d, 3).unwrap();
        let pure = QuditOperator::density(psi.projector()).unwrap();
        let mixed = QuditOperator::density(
            Array2::eye(d).mapv(|z: Complex64| z / d as f64),
        )
        .unwrap();
        let f = state_fidelity(&mixed, &pure).unwrap();
        assert!((f - 1.0 / (d as f64).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn unitary_fidelity_phase_invariant() {
        let w = haar_random_unitary(6, 1).unwrap();
        let phased = w.entries().mapv(|z| z * Complex64::from_polar(1.0, 0.83));
        let wp = QuditOperator::unitary(phased).unwrap();
        assert!((unitary_fidelity(&w, &w).unwrap() - 1.0).abs() < 1e-12);
        assert!((unitary_fidelity(&w, &wp).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traceless_pauli_zero() {
        let id = QuditOperator::unitary(Array2::eye(2)).unwrap();
        let sx = QuditOperator::unitary(array![[ZERO, ONE], [ONE, ZERO]]).unwrap();
        assert!(unitary_fidelity(&id, &sx).unwrap() < 1e-14);
    }

    #[test]
    fn subspace_full_space_limit() {
        let d = 5;
        let w = haar_random_unitary(d, 4).unwrap();
        let u = haar_random_unitary(d, 5).unwrap();
        let p = QuditOperator::identity(d);
        let fs = subspace_fidelity(&w, &u, &p, d).unwrap();
        let fu = unitary_fidelity(&w, &u).unwrap();
        assert!((fs - fu).abs() < 1e-13);
    }

    #[test]
    fn subspace_ignores_complement() {
        // U matches W on the projected block; random complement is irrelevant.
        let d = 6;
        let ds = 3;
        let wblock = haar_random_unitary(ds, 7).unwrap();
        let cblock = haar_random_unitary(d - ds, 8).unwrap();
        let mut w: CMat = Array2::eye(d);
        let mut u: CMat = Array2::zeros((d, d));
        for i in 0..ds {
            for j in 0..ds {
                w[[i, j]] = wblock.entries()[[i, j]];
                u[[i, j]] = wblock.entries()[[i, j]];
            }
        }
        for i in 0..d - ds {
            for j in 0..d - ds {
                u[[ds + i, ds + j]] = cblock.entries()[[i, j]];
            }
        }
        let mut p: CMat = Array2::zeros((d, d));
        for i in 0..ds {
            p[[i, i]] = ONE;
        }
        let f = subspace_fidelity_mat(&w, &u, &p, ds).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isometry_reductions() {
        let d = 6;
        let u = haar_random_unitary(d, 9).unwrap();
        // ds = 1: |<psi_f| U |psi_i>|^2
        let yi = Ket::basis_state(d, 2);
        let zf = yi.apply(u.entries());
        let y = {
            let mut m: CMat = Array2::zeros((d, 1));
            for i in 0..d {
                m[[i, 0]] = yi.amplitudes()[i];
            }
            m
        };
        let z = {
            let mut m: CMat = Array2::zeros((d, 1));
            for i in 0..d {
                m[[i, 0]] = zf.amplitudes()[i];
            }
            m
        };
        assert!((isometry_fidelity(&z, &u, &y).unwrap() - 1.0).abs() < 1e-12);
        // ds = d with Z = U Y reduces to the unitary fidelity of U with itself.
        let y_full: CMat = Array2::eye(d);
        let z_full = u.entries().clone();
        assert!((isometry_fidelity(&z_full, &u, &y_full).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_invariance_of_state_fidelity() {
        let d = 4;
        let u = haar_random_unitary(d, 11).unwrap();
        let a = crate::random::haar_random_state(d, 12).unwrap();
        let mixed = {
            let mut m = a.projector();
            for i in 0..d {
                m[[i, i]] += Complex64::new(0.25, 0.0);
            }
            m.mapv(|z| z / 2.0)
        };
        let pure = crate::random::haar_random_state(d, 13).unwrap().projector();
        let f0 = state_fidelity_mat(&mixed, &pure).unwrap();
        let rot = |m: &CMat| u.entries().dot(m).dot(&crate::linalg::dagger(u.entries()));
        let f1 = state_fidelity_mat(&rot(&mixed), &rot(&pure)).unwrap();
        assert!((f0 - f1).abs() < 1e-9);
    }
}


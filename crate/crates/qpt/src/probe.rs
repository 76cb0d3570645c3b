//! Intelligent probe states and the analytic reconstruction of a unitary
//! from its exact outputs on them.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use qudit_core::linalg::{dagger, eigh, frobenius_norm};
use qudit_core::{CMat, CVec, Ket};

use crate::QptError;

/// The d probe states |0> and (|0> + |n>)/sqrt(2), n = 1..d-1, sufficient
/// to identify a unitary process.
pub fn intelligent_probes(d: usize) -> Result<Vec<Ket>, QptError> {
    if d < 2 {
        return Err(QptError::Mismatch(format!("need d >= 2, got {d}")));
    }
    let mut probes = Vec::with_capacity(d);
    probes.push(Ket::basis_state(d, 0));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for n in 1..d {
        let mut v: CVec = Array1::zeros(d);
        v[0] = Complex64::new(s, 0.0);
        v[n] = Complex64::new(s, 0.0);
        probes.push(Ket::normalized(v).map_err(QptError::Core)?);
    }
    Ok(probes)
}

/// Recover U = sum_n |u_n><n| from the exact output density matrices of the
/// intelligent probes: |u_0> is the top eigenvector of the first output,
/// and each U|psi_n><psi_n|U^dag determines |u_n> including its phase via
/// rho_n |u_0> = (|u_0> + |u_n>)/2 and the orthogonality of the image basis.
///
/// Returns the reconstructed unitary and its unitarity defect ||U^dag U - I||.
pub fn analytic_unitary_reconstruction(outputs: &[CMat]) -> Result<(CMat, f64), QptError> {
    let d = outputs.len();
    if d < 2 {
        return Err(QptError::Mismatch("need at least two probe outputs".into()));
    }
    for (n, o) in outputs.iter().enumerate() {
        if o.nrows() != d || o.ncols() != d {
            return Err(QptError::Mismatch(format!(
                "output {n} is {}x{}, expected {d}x{d}",
                o.nrows(),
                o.ncols()
            )));
        }
    }
    // |u_0>: dominant eigenvector, phase fixed so the first sizable
    // component is positive real (<0|u_0> >= 0 when it does not vanish).
    let dec = eigh(&outputs[0])?;
    let mut u0: CVec = Array1::zeros(d);
    for i in 0..d {
        u0[i] = dec.vectors[[i, d - 1]];
    }
    let anchor = (0..d)
        .find(|&i| u0[i].norm() > 1e-8)
        .ok_or_else(|| QptError::Reconstruction("vanishing dominant eigenvector".into()))?;
    let phase = u0[anchor] / u0[anchor].norm();
    u0.mapv_inplace(|z| z * phase.conj());

    let mut u: CMat = Array2::zeros((d, d));
    for i in 0..d {
        u[[i, 0]] = u0[i];
    }
    for n in 1..d {
        // w = rho_n u0 = ((1 + <u_n|u_0>)/2) (u0 + u_n) = (u0 + u_n)/2
        // because <u_n|u_0> = 0 for a unitary image basis.
        let w = outputs[n].dot(&u0);
        let overlap: Complex64 = u0.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
        if overlap.norm() < 1e-6 {
            return Err(QptError::Reconstruction(format!(
                "probe {n}: output has vanishing overlap with |u_0|; relative phase undetermined"
            )));
        }
        for i in 0..d {
            u[[i, n]] = 2.0 * w[i] - u0[i];
        }
    }
    let g = dagger(&u).dot(&u);
    let defect = frobenius_norm(&(&g - &qudit_core::linalg::identity(d)));
    Ok((u, defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qudit_core::haar_random_unitary;

    fn outputs_of(u: &CMat, d: usize) -> Vec<CMat> {
        intelligent_probes(d)
            .unwrap()
            .iter()
            .map(|p| {
                let out = u.dot(p.amplitudes());
                let mut rho: CMat = Array2::zeros((d, d));
                for i in 0..d {
                    for j in 0..d {
                        rho[[i, j]] = out[i] * out[j].conj();
                    }
                }
                rho
            })
            .collect()
    }

    #[test]
    fn probe_counts_and_overlaps() {
        let probes = intelligent_probes(4).unwrap();
        assert_eq!(probes.len(), 4);
        let zero = Ket::basis_state(4, 0);
        for (n, p) in probes.iter().enumerate() {
            let norm: f64 = p.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            if n > 0 {
                let ov = zero.inner(p).norm();
                assert!((ov - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_reconstruction_up_to_phase() {
        for d in [2usize, 4, 7, 16] {
            let u = haar_random_unitary(d, 40 + d as u64).unwrap();
            let outs = outputs_of(u.entries(), d);
            let (rec, defect) = analytic_unitary_reconstruction(&outs).unwrap();
            assert!(defect < 1e-9, "unitarity defect {defect:.3e} at d={d}");
            let f = {
                let tr = qudit_core::linalg::trace(&dagger(&rec).dot(u.entries()));
                tr.norm_sqr() / ((d * d) as f64)
            };
            assert!(1.0 - f < 1e-9, "fidelity loss {} at d={d}", 1.0 - f);
        }
    }

    #[test]
    fn diagonal_unitary_phases_recovered() {
        let d = 5;
        let mut um: CMat = Array2::zeros((d, d));
        for i in 0..d {
            um[[i, i]] = Complex64::from_polar(1.0, 0.7 * i as f64);
        }
        let outs = outputs_of(&um, d);
        let (rec, defect) = analytic_unitary_reconstruction(&outs).unwrap();
        assert!(defect < 1e-10);
        // Up to global phase the diagonal must match.
        let g0 = rec[[0, 0]] / um[[0, 0]];
        for i in 0..d {
            assert!((rec[[i, i]] - um[[i, i]] * g0).norm() < 1e-10);
        }
    }
}

//! Symmetric informationally complete POVM for d = 4 from a Weyl-Heisenberg
//! orbit of a numerically optimized fiducial vector.
//!
//! Any normalized fiducial's orbit is a tight frame (the d^2 displaced
//! projectors sum to d times the identity), so completeness is automatic;
//! the fiducial search only has to flatten the pairwise overlaps to
//! 1/(d+1). The search minimizes the summed squared overlap deviations with
//! Levenberg-Marquardt refinement from multiple seeded starts.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::{CMat, CVec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::construction::{IcClass, PovmConstruction, PovmElement};
use crate::PovmError;

/// Displacement operators D_{p,q} = tau^{pq} X^p Z^q on dimension d.
fn displacements(d: usize) -> Vec<CMat> {
    let omega = std::f64::consts::TAU / d as f64;
    let tau = std::f64::consts::PI * (d as f64 + 1.0) / d as f64;
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        for q in 0..d {
            let mut m: CMat = Array2::zeros((d, d));
            for col in 0..d {
                let row = (col + p) % d;
                let phase = tau * (p * q) as f64 + omega * (q * col) as f64;
                m[[row, col]] = Complex64::from_polar(1.0, phase);
            }
            out.push(m);
        }
    }
    out
}

fn overlap_residuals(fiducial: &CVec, ds: &[CMat], d: usize) -> Vec<f64> {
    let target = 1.0 / (d as f64 + 1.0);
    ds.iter()
        .skip(1)
        .map(|dm| {
            let dv = dm.dot(fiducial);
            let z: Complex64 = fiducial.iter().zip(dv.iter()).map(|(a, b)| a.conj() * b).sum();
            z.norm_sqr() - target
        })
        .collect()
}

fn params_to_fiducial(x: &[f64]) -> CVec {
    let d = x.len() / 2;
    let mut v = CVec::from_iter((0..d).map(|i| Complex64::new(x[2 * i], x[2 * i + 1])));
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.mapv_inplace(|z| z / n);
    }
    v
}

fn objective(x: &[f64], ds: &[CMat], d: usize) -> f64 {
    let f = params_to_fiducial(x);
    overlap_residuals(&f, ds, d).iter().map(|r| r * r).sum()
}

/// Levenberg-Marquardt on the overlap residuals with numerical Jacobian.
fn refine_lm(x0: Vec<f64>, ds: &[CMat], d: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let m = d * d - 1;
    let mut x = x0;
    let mut lambda = 1e-3;
    let mut fx = objective(&x, ds, d);
    for _ in 0..400 {
        let r0 = overlap_residuals(&params_to_fiducial(&x), ds, d);
        // Numerical Jacobian.
        let h = 1e-7;
        let mut jt_j = Array2::<f64>::zeros((n, n));
        let mut jt_r = vec![0.0; n];
        let mut jac = vec![vec![0.0; n]; m];
        for c in 0..n {
            let mut xp = x.clone();
            xp[c] += h;
            let mut xm = x.clone();
            xm[c] -= h;
            let rp = overlap_residuals(&params_to_fiducial(&xp), ds, d);
            let rm = overlap_residuals(&params_to_fiducial(&xm), ds, d);
            for rr in 0..m {
                jac[rr][c] = (rp[rr] - rm[rr]) / (2.0 * h);
            }
        }
        for i in 0..n {
            for j in 0..n {
                jt_j[[i, j]] = (0..m).map(|rr| jac[rr][i] * jac[rr][j]).sum();
            }
            jt_r[i] = (0..m).map(|rr| jac[rr][i] * r0[rr]).sum();
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jt_j.clone();
            for i in 0..n {
                damped[[i, i]] += lambda * (jt_j[[i, i]].max(1e-12));
            }
            let rhs: Vec<f64> = jt_r.iter().map(|v| -v).collect();
            let Ok(step) = qudit_core::linalg::solve_spd(&damped, &rhs) else {
                lambda *= 10.0;
                continue;
            };
            let x_trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let ft = objective(&x_trial, ds, d);
            if ft < fx {
                x = x_trial;
                fx = ft;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved || fx < 1e-22 {
            break;
        }
    }
    (x, fx)
}

/// SIC POVM for d = 4: one setting of d^2 subnormalized rank-1 elements
/// (1/d)|phi_k><phi_k| with all pairwise |<phi_j|phi_k>|^2 = 1/(d+1).
pub fn sic(d: usize) -> Result<PovmConstruction, PovmError> {
    if d != 4 {
        return Err(PovmError::UnsupportedDimension(format!(
            "SIC construction provided for d = 4 only, got {d}"
        )));
    }
    let ds = displacements(d);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for seed in 0..40u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(0x51C0 + seed);
        let x0: Vec<f64> = (0..2 * d).map(|_| rng.gen::<f64>() - 0.5).collect();
        let (x, fx) = refine_lm(x0, &ds, d);
        if best.as_ref().map_or(true, |(_, b)| fx < *b) {
            best = Some((x, fx));
        }
        if fx < 1e-22 {
            break;
        }
    }
    let (x, fx) = best.unwrap();
    if fx > 1e-17 {
        return Err(PovmError::ConstructionFailed(format!(
            "SIC fiducial search stalled at objective {fx:.3e}"
        )));
    }
    let fiducial = params_to_fiducial(&x);
    let weight = 1.0 / (d as f64).sqrt();
    let elements: Vec<PovmElement> = ds
        .iter()
        .enumerate()
        .map(|(k, dm)| PovmElement {
            ket: dm.dot(&fiducial).mapv(|z| z * weight),
            setting: 0,
            outcome: k,
        })
        .collect();
    Ok(PovmConstruction {
        name: format!("SIC{d}"),
        dim: d,
        ic_class: IcClass::FullyIc,
        settings: vec![elements],
        notes: vec![format!("fiducial search objective {fx:.3e}")],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sic4_overlaps_and_completeness() {
        let c = sic(4).unwrap();
        assert_eq!(c.n_outcomes(), 16);
        assert_eq!(c.n_settings(), 1);
        assert!(c.completeness_defect() < 1e-8);
        // All 120 distinct pair overlaps at 1/5 within 1e-8 (kets carry the
        // 1/sqrt(d) weight, so compare normalized overlaps).
        let kets: Vec<&CVec> = c.settings[0].iter().map(|e| &e.ket).collect();
        let norm2 = kets[0].iter().map(|z| z.norm_sqr()).sum::<f64>();
        for i in 0..16 {
            for j in i + 1..16 {
                let ov: Complex64 = kets[i]
                    .iter()
                    .zip(kets[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let normalized = ov.norm_sqr() / (norm2 * norm2);
                assert!(
                    (normalized - 0.2).abs() < 1e-8,
                    "pair ({i},{j}) overlap {normalized}"
                );
            }
        }
    }

    #[test]
    fn unsupported_dim_rejected() {
        assert!(sic(5).is_err());
    }
}

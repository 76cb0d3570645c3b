//! Minimal pure-state informationally complete POVM with 3d - 2 outcomes,
//! built from the projector family {|n><n|} and the two interference
//! families (|0> + |n>)/sqrt(2), (|0> + i|n>)/sqrt(2).
//!
//! A nonnegative weight solve against the identity is attempted first, as
//! the natural reading of the construction; it is provably infeasible for
//! these kets (the (0,n) off-diagonal of the weighted sum is w2/2 - i w3/2,
//! which no positive weights can cancel), so the construction falls back to
//! the symmetric inverse-frame dressing E_a = S^{-1/2} A_a S^{-1/2} with
//! S = sum A_a. The dressing keeps every element rank-1, makes the sum the
//! identity exactly, preserves pure-state identifiability, and keeps the
//! outcome count at 3d - 2.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use qudit_core::linalg::{eigh, nnls};
use qudit_core::{CMat, CVec};

use crate::construction::{IcClass, PovmConstruction, PovmElement};
use crate::PovmError;

fn candidate_kets(d: usize) -> Vec<CVec> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut kets: Vec<CVec> = Vec::with_capacity(3 * d - 2);
    for n in 0..d {
        let mut v: CVec = Array1::zeros(d);
        v[n] = Complex64::new(1.0, 0.0);
        kets.push(v);
    }
    for n in 1..d {
        let mut v: CVec = Array1::zeros(d);
        v[0] = Complex64::new(s, 0.0);
        v[n] = Complex64::new(s, 0.0);
        kets.push(v);
    }
    for n in 1..d {
        let mut v: CVec = Array1::zeros(d);
        v[0] = Complex64::new(s, 0.0);
        v[n] = Complex64::new(0.0, s);
        kets.push(v);
    }
    kets
}

/// Pure-state IC construction with 3d - 2 rank-1 outcomes summing to the
/// identity.
pub fn psi(d: usize) -> Result<PovmConstruction, PovmError> {
    if d < 2 {
        return Err(PovmError::UnsupportedDimension(format!("PSI needs d >= 2, got {d}")));
    }
    let kets = candidate_kets(d);
    let n_el = kets.len();

    // Attempt: nonnegative weights w with sum_a w_a |k_a><k_a| = I, as a
    // real least-squares system over the d^2 independent entries.
    let rows = d * d;
    let mut a = Array2::<f64>::zeros((2 * rows, n_el));
    let mut b = vec![0.0f64; 2 * rows];
    for i in 0..d {
        for j in 0..d {
            let r = i * d + j;
            if i == j {
                b[r] = 1.0;
            }
            for (c, k) in kets.iter().enumerate() {
                let e = k[i] * k[j].conj();
                a[[r, c]] = e.re;
                a[[rows + r, c]] = e.im;
            }
        }
    }
    let (weights, residual) = nnls(&a, &b)?;
    let mut notes = Vec::new();
    // A genuine solve must keep every outcome present; the projector subset
    // alone reproduces the identity with the interference elements zeroed,
    // which is not this construction.
    let min_weight = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    if residual < 1e-8 && min_weight > 1e-9 {
        notes.push(format!("weights from NNLS, residual {residual:.3e}"));
        let elements = kets
            .into_iter()
            .zip(weights.iter())
            .enumerate()
            .map(|(o, (k, &w))| PovmElement {
                ket: k.mapv(|z| z * w.sqrt()),
                setting: 0,
                outcome: o,
            })
            .collect();
        return Ok(PovmConstruction {
            name: format!("PSI{d}"),
            dim: d,
            ic_class: IcClass::Rank1Strict,
            settings: vec![elements],
            notes,
        });
    }
    notes.push(format!(
        "NNLS weight solve infeasible (residual {residual:.3e}, min weight {min_weight:.3e}); completed via inverse-frame dressing"
    ));

    // Fallback: S^{-1/2} dressing of the unit-weight frame.
    let mut s_mat: CMat = Array2::zeros((d, d));
    for k in &kets {
        for i in 0..d {
            for j in 0..d {
                s_mat[[i, j]] += k[i] * k[j].conj();
            }
        }
    }
    let dec = eigh(&s_mat)?;
    let min_eig = dec.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig <= 1e-12 {
        return Err(PovmError::ConstructionFailed(format!(
            "PSI frame operator singular (min eigenvalue {min_eig:.3e})"
        )));
    }
    let s_inv_half = dec.map_spectrum(|w| Complex64::new(1.0 / w.sqrt(), 0.0));
    let elements: Vec<PovmElement> = kets
        .iter()
        .enumerate()
        .map(|(o, k)| PovmElement { ket: s_inv_half.dot(k), setting: 0, outcome: o })
        .collect();

    // The dressed elements must reproduce the identity exactly.
    let mut acc: CMat = Array2::zeros((d, d));
    for e in &elements {
        acc = &acc + &e.operator();
    }
    let defect = qudit_core::linalg::frobenius_norm(&(&acc - &qudit_core::linalg::identity(d)));
    if defect > 1e-10 {
        return Err(PovmError::ConstructionFailed(format!(
            "PSI dressing completeness defect {defect:.3e}"
        )));
    }
    Ok(PovmConstruction {
        name: format!("PSI{d}"),
        dim: d,
        ic_class: IcClass::Rank1Strict,
        settings: vec![elements],
        notes,
    })
}

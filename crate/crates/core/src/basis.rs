//! Canonical basis layout of the 16-dimensional hyperfine qudit and
//! angular-momentum operators per manifold.
//!
//! Index convention used everywhere in this workspace:
//! indices 0..=8 are (F=4, mF=+4..-4), indices 9..=15 are (F=3, mF=+3..-3).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::CoreError;
use crate::operator::{OperatorRole, QuditOperator};
use crate::CMat;

/// Label of a logical basis state |F, mF> with its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BasisLabel {
    pub f: i32,
    pub m_f: i32,
    pub index: usize,
}

impl BasisLabel {
    /// Canonical ordering of all 16 states: F=4 block first, mF descending.
    pub fn all() -> Vec<BasisLabel> {
        let mut out = Vec::with_capacity(16);
        for (i, m) in (-4..=4).rev().enumerate() {
            out.push(BasisLabel { f: 4, m_f: m, index: i });
        }
        for (i, m) in (-3..=3).rev().enumerate() {
            out.push(BasisLabel { f: 3, m_f: m, index: 9 + i });
        }
        out
    }

    /// Canonical index of |F, mF>.
    pub fn index_of(f: i32, m_f: i32) -> Result<usize, CoreError> {
        match f {
            4 if m_f.abs() <= 4 => Ok((4 - m_f) as usize),
            3 if m_f.abs() <= 3 => Ok(9 + (3 - m_f) as usize),
            _ => Err(CoreError::arg(format!("no state |{f},{m_f}> in the ground manifold"))),
        }
    }

    pub fn from_index(index: usize) -> Result<BasisLabel, CoreError> {
        if index < 9 {
            Ok(BasisLabel { f: 4, m_f: 4 - index as i32, index })
        } else if index < 16 {
            Ok(BasisLabel { f: 3, m_f: 3 - (index as i32 - 9), index })
        } else {
            Err(CoreError::arg(format!("basis index {index} out of range")))
        }
    }
}

/// Standard angular-momentum matrices (Fx, Fy, Fz) for spin F in the
/// mF-descending basis, hbar = 1. F may be a half-integer.
pub fn spin_operators(f: f64) -> Result<(QuditOperator, QuditOperator, QuditOperator), CoreError> {
    if f <= 0.0 {
        return Err(CoreError::arg(format!("spin F must be positive, got {f}")));
    }
    let two_f = (2.0 * f).round();
    if (2.0 * f - two_f).abs() > 1e-12 {
        return Err(CoreError::arg(format!("spin F must be a half-integer, got {f}")));
    }
    let dim = two_f as usize + 1;
    let m_of = |i: usize| f - i as f64; // row i holds mF = F - i (descending)

    let mut fz: CMat = Array2::zeros((dim, dim));
    let mut fp: CMat = Array2::zeros((dim, dim)); // raising operator F+
    for i in 0..dim {
        fz[[i, i]] = Complex64::new(m_of(i), 0.0);
    }
    // <m+1| F+ |m> = sqrt(F(F+1) - m(m+1)); |m+1> is one row above |m>.
    for i in 1..dim {
        let m = m_of(i);
        let amp = (f * (f + 1.0) - m * (m + 1.0)).sqrt();
        fp[[i - 1, i]] = Complex64::new(amp, 0.0);
    }
    let fm = crate::linalg::dagger(&fp);
    let fx = (&fp + &fm).mapv(|z| 0.5 * z);
    let fy = (&fp - &fm).mapv(|z| Complex64::new(0.0, -0.5) * z);

    Ok((
        QuditOperator::hermitian(fx)?,
        QuditOperator::hermitian(fy)?,
        QuditOperator::hermitian(fz)?,
    ))
}

/// Block-diagonal embedding of a 9-dim (F=4) and a 7-dim (F=3) operator into
/// the canonical 16-dim layout.
pub fn embed_block(op4: &QuditOperator, op3: &QuditOperator) -> Result<QuditOperator, CoreError> {
    if op4.dim() != 9 || op3.dim() != 7 {
        return Err(CoreError::dim(format!(
            "embed_block expects dims (9, 7), got ({}, {})",
            op4.dim(),
            op3.dim()
        )));
    }
    let out = embed_block_mat(op4.entries(), op3.entries());
    Ok(QuditOperator::new(out, OperatorRole::General)?)
}

/// Raw-matrix version of [`embed_block`].
pub fn embed_block_mat(op4: &CMat, op3: &CMat) -> CMat {
    let mut out: CMat = Array2::zeros((16, 16));
    for i in 0..9 {
        for j in 0..9 {
            out[[i, j]] = op4[[i, j]];
        }
    }
    for i in 0..7 {
        for j in 0..7 {
            out[[9 + i, 9 + j]] = op3[[i, j]];
        }
    }
    out
}

/// Projector onto the F=4 manifold in the canonical layout.
pub fn projector_f4() -> CMat {
    embed_block_mat(&Array2::eye(9), &Array2::zeros((7, 7)))
}

/// Projector onto the F=3 manifold in the canonical layout.
pub fn projector_f3() -> CMat {
    embed_block_mat(&Array2::zeros((9, 9)), &Array2::eye(7))
}

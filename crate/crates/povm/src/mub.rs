//! Mutually unbiased bases.
//!
//! Power-of-two dimensions use the Galois-field construction: besides the
//! logical basis, basis `a` (a in GF(d)) has vectors
//!     v_{a,b}[x] = d^{-1/2} i^{Q_a(x)} (-1)^{b.x},
//! where Q_a(x) = sum_j M_jj x_j + 2 sum_{i<j} M_ij x_i x_j mod 4 is the
//! mod-4 quadratic form of the symmetric binary matrix M_a with entries
//! (M_a)_{ij} = tr(a e_i e_j). Differences M_a - M_a' are nonsingular over
//! GF(2) because the trace form is nondegenerate, which makes the quadratic
//! Gauss sums flat at magnitude sqrt(d): exact unbiasedness.
//!
//! Odd prime dimensions (used for 7-dimensional process tomography) use the
//! exponential-sum construction v_{a,b}[x] = d^{-1/2} w^{a x^2 + b x}.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::CMat;

use crate::construction::{IcClass, PovmConstruction};
use crate::gf::BinaryField;
use crate::PovmError;

/// MUB construction for d in {2, 4, 8, 16}: d + 1 bases, the first being
/// the logical basis.
pub fn mub(d: usize) -> Result<PovmConstruction, PovmError> {
    let field = BinaryField::new(d).ok_or_else(|| {
        PovmError::UnsupportedDimension(format!(
            "MUB construction implemented for powers of two up to 16, got {d}"
        ))
    })?;
    let k = field.k as usize;
    let mut bases: Vec<CMat> = Vec::with_capacity(d + 1);
    bases.push(Array2::eye(d));

    // Symmetric bilinear-form matrices from field multiplication.
    let basis_el = |i: usize| 1u16 << i;
    let norm = 1.0 / (d as f64).sqrt();
    for a in 0..d as u16 {
        let mut m = vec![vec![0u8; k]; k];
        for i in 0..k {
            for j in 0..k {
                let prod = field.mul(field.mul(a, basis_el(i)), basis_el(j));
                m[i][j] = field.trace(prod) as u8;
            }
        }
        let q_form = |x: usize| -> u32 {
            let mut q = 0u32;
            for i in 0..k {
                if (x >> i) & 1 == 1 {
                    q += m[i][i] as u32;
                }
            }
            for i in 0..k {
                for j in i + 1..k {
                    if (x >> i) & 1 == 1 && (x >> j) & 1 == 1 {
                        q += 2 * m[i][j] as u32;
                    }
                }
            }
            q % 4
        };
        let mut basis: CMat = Array2::zeros((d, d));
        for b in 0..d {
            for x in 0..d {
                let dot = ((b & x).count_ones() & 1) as i32;
                let sign = if dot == 0 { 1.0 } else { -1.0 };
                let phase = match q_form(x) {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
                basis[[x, b]] = phase * sign * norm;
            }
        }
        bases.push(basis);
    }
    Ok(PovmConstruction::from_bases(format!("MUB{d}"), IcClass::FullyIc, &bases))
}

/// MUB construction for an odd prime dimension: d + 1 bases via quadratic
/// exponential sums. Extends the measurement set beyond the power-of-two
/// construction for the 7-dimensional process-tomography experiments.
pub fn mub_prime(d: usize) -> Result<PovmConstruction, PovmError> {
    let is_prime = d >= 2 && (2..d).all(|q| d % q != 0);
    if !is_prime || d % 2 == 0 {
        return Err(PovmError::UnsupportedDimension(format!(
            "prime-dimension MUB construction needs an odd prime, got {d}"
        )));
    }
    let omega = std::f64::consts::TAU / d as f64;
    let norm = 1.0 / (d as f64).sqrt();
    let mut bases: Vec<CMat> = Vec::with_capacity(d + 1);
    bases.push(Array2::eye(d));
    for a in 0..d {
        let mut basis: CMat = Array2::zeros((d, d));
        for b in 0..d {
            for x in 0..d {
                let exponent = ((a * x * x + b * x) % d) as f64;
                basis[[x, b]] = Complex64::from_polar(norm, omega * exponent);
            }
        }
        bases.push(basis);
    }
    Ok(PovmConstruction::from_bases(format!("MUB{d}"), IcClass::FullyIc, &bases))
}

/// Worst-case deviation of the cross-basis overlaps from 1/d.
pub fn unbiasedness_defect(c: &PovmConstruction) -> f64 {
    let d = c.dim;
    let inv_d = 1.0 / d as f64;
    let mut worst = 0.0f64;
    for s1 in 0..c.n_settings() {
        for s2 in s1 + 1..c.n_settings() {
            for e1 in &c.settings[s1] {
                for e2 in &c.settings[s2] {
                    let ov: Complex64 = e1
                        .ket
                        .iter()
                        .zip(e2.ket.iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    worst = worst.max((ov.norm_sqr() - inv_d).abs());
                }
            }
        }
    }
    worst
}

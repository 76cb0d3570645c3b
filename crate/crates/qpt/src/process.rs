//! Process matrices over the orthonormal Hermitian basis {Y_a} with
//! Y_0 = I/sqrt(d):  W[rho] = sum_ab chi_ab Y_a rho Y_b.
//!
//! Internally the crate works with the Choi matrix J = V chi V^dag, where
//! V = [vec(Y_0) ... vec(Y_{d^2-1})] is unitary because the basis is
//! orthonormal under the Hilbert-Schmidt inner product. Complete positivity
//! is J >= 0 (same spectrum as chi) and trace preservation is a partial
//! trace condition, both cheap in Choi coordinates; the chi form stays the
//! public, serialized representation.

use ndarray::Array2;
use num_complex::Complex64;
use qudit_core::linalg::{dagger, eigh, frobenius_norm, sqrtm_psd, trace};
use qudit_core::opbasis::hermitian_basis;
use qudit_core::CMat;

use crate::QptError;

/// The fixed operator basis serving as the meaning of chi entries.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    pub dim: usize,
    pub elements: Vec<CMat>,
}

impl OperatorBasis {
    pub fn new(dim: usize) -> OperatorBasis {
        OperatorBasis { dim, elements: hermitian_basis(dim) }
    }
}

/// chi -> J: J = sum_ab chi_ab vec(Y_a) vec(Y_b)^dag with row-major vec.
pub(crate) fn chi_to_choi(chi: &CMat, basis: &OperatorBasis) -> CMat {
    let d = basis.dim;
    let n = d * d;
    // Sparse representation of each basis element.
    let sparse: Vec<Vec<(usize, Complex64)>> = basis
        .elements
        .iter()
        .map(|u| {
            let mut entries = Vec::new();
            for a in 0..d {
                for b in 0..d {
                    let z = u[[a, b]];
                    if z != Complex64::new(0.0, 0.0) {
                        entries.push((a * d + b, z));
                    }
                }
            }
            entries
        })
        .collect();
    let mut j: CMat = Array2::zeros((n, n));
    for alpha in 0..n {
        for beta in 0..n {
            let c = chi[[alpha, beta]];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(ra, za) in &sparse[alpha] {
                for &(rb, zb) in &sparse[beta] {
                    j[[ra, rb]] += c * za * zb.conj();
                }
            }
        }
    }
    j
}

/// J -> chi via the adjoint transform chi_ab = vec(Y_a)^dag J vec(Y_b).
pub(crate) fn choi_to_chi(j: &CMat, basis: &OperatorBasis) -> CMat {
    let d = basis.dim;
    let n = d * d;
    let sparse: Vec<Vec<(usize, Complex64)>> = basis
        .elements
        .iter()
        .map(|u| {
            let mut entries = Vec::new();
            for a in 0..d {
                for b in 0..d {
                    let z = u[[a, b]];
                    if z != Complex64::new(0.0, 0.0) {
                        entries.push((a * d + b, z));
                    }
                }
            }
            entries
        })
        .collect();
    let mut chi: CMat = Array2::zeros((n, n));
    for alpha in 0..n {
        for beta in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(ra, za) in &sparse[alpha] {
                for &(rb, zb) in &sparse[beta] {
                    acc += za.conj() * j[[ra, rb]] * zb;
                }
            }
            chi[[alpha, beta]] = acc;
        }
    }
    chi
}

/// Partial trace over the output index: (Tr_out J)_{bd} = sum_a J[(a,b),(a,d)].
pub(crate) fn choi_trace_out(j: &CMat, d: usize) -> CMat {
    let mut out: CMat = Array2::zeros((d, d));
    for b in 0..d {
        for dd in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..d {
                acc += j[[a * d + b, a * d + dd]];
            }
            out[[b, dd]] = acc;
        }
    }
    out
}

/// Process matrix in the fixed operator basis.
#[derive(Debug, Clone)]
pub struct ProcessMatrix {
    pub dim: usize,
    pub chi: CMat,
}

impl ProcessMatrix {
    pub fn new(dim: usize, chi: CMat) -> Result<ProcessMatrix, QptError> {
        if chi.nrows() != dim * dim || chi.ncols() != dim * dim {
            return Err(QptError::Mismatch(format!(
                "chi must be {0}x{0} for dim {1}, got {2}x{3}",
                dim * dim,
                dim,
                chi.nrows(),
                chi.ncols()
            )));
        }
        let herm = qudit_core::linalg::hermiticity_error(&chi);
        let scale = chi.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if herm > 1e-10 * scale {
            return Err(QptError::InvalidProcess(format!(
                "chi is not Hermitian (deviation {herm:.3e})"
            )));
        }
        Ok(ProcessMatrix { dim, chi })
    }

    pub fn basis(&self) -> OperatorBasis {
        OperatorBasis::new(self.dim)
    }

    pub fn choi(&self) -> CMat {
        chi_to_choi(&self.chi, &self.basis())
    }

    pub fn from_choi(dim: usize, j: &CMat) -> Result<ProcessMatrix, QptError> {
        let chi = choi_to_chi(j, &OperatorBasis::new(dim));
        ProcessMatrix::new(dim, chi)
    }

    /// Most negative eigenvalue of chi (0 when CP within tolerance).
    pub fn cp_violation(&self) -> Result<f64, QptError> {
        let dec = eigh(&self.chi)?;
        Ok((-dec.values.iter().cloned().fold(f64::INFINITY, f64::min)).max(0.0))
    }

    /// || sum_nm chi_nm Y_m Y_n - I ||_F, the trace-preservation defect.
    pub fn tp_violation(&self) -> f64 {
        let j = self.choi();
        let t = choi_trace_out(&j, self.dim);
        frobenius_norm(&(&t - &qudit_core::linalg::identity(self.dim)))
    }
}

/// Rank-1 process matrix of a unitary map: chi = c c^dag with
/// c_a = Tr(Y_a^dag U); equivalently the Choi matrix vec(U) vec(U)^dag.
pub fn unitary_to_chi(u: &CMat) -> Result<ProcessMatrix, QptError> {
    let d = u.nrows();
    let basis = OperatorBasis::new(d);
    let n = d * d;
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (alpha, y) in basis.elements.iter().enumerate() {
        c[alpha] = trace(&dagger(y).dot(u));
    }
    let mut chi: CMat = Array2::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            chi[[a, b]] = c[a] * c[b].conj();
        }
    }
    ProcessMatrix::new(d, chi)
}

/// Apply the process to a state through the Choi contraction
/// W[rho]_{ij} = sum_kl J[(i,k),(j,l)] rho_{kl}.
pub fn apply_process(chi: &ProcessMatrix, rho: &CMat) -> Result<CMat, QptError> {
    let d = chi.dim;
    if rho.nrows() != d {
        return Err(QptError::Mismatch(format!(
            "state dim {} vs process dim {d}",
            rho.nrows()
        )));
    }
    let tp = chi.tp_violation();
    if tp > 1e-6 {
        return Err(QptError::InvalidProcess(format!(
            "process is not trace preserving (defect {tp:.3e})"
        )));
    }
    let j = chi.choi();
    let mut out: CMat = Array2::zeros((d, d));
    for i in 0..d {
        for jj in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                let row = i * d + k;
                for l in 0..d {
                    acc += j[[row, jj * d + l]] * rho[[k, l]];
                }
            }
            out[[i, jj]] = acc;
        }
    }
    Ok(out)
}

/// Process fidelity (1/d^2) (Tr sqrt(sqrt(chi) chi_e sqrt(chi)))^2; inputs
/// are floored at -1e-8 on the spectrum before the square roots.
pub fn process_fidelity(chi_e: &ProcessMatrix, chi_target: &ProcessMatrix) -> Result<f64, QptError> {
    if chi_e.dim != chi_target.dim {
        return Err(QptError::Mismatch(format!(
            "process dims {} vs {}",
            chi_e.dim, chi_target.dim
        )));
    }
    let d2 = (chi_e.dim * chi_e.dim) as f64;
    let floor_psd = |m: &CMat| -> Result<CMat, QptError> {
        let dec = eigh(m)?;
        let min = dec.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = dec.values.iter().cloned().fold(1.0f64, |a, b| a.max(b.abs()));
        if min < -1e-8 * scale.max(1.0) {
            return Err(QptError::InvalidProcess(format!(
                "process matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(dec.map_spectrum(|w| Complex64::new(w.max(0.0), 0.0)))
    };
    let a = floor_psd(&chi_target.chi)?;
    let b = floor_psd(&chi_e.chi)?;
    let sa = sqrtm_psd(&a)?;
    let m = sa.dot(&b).dot(&sa);
    let dec = eigh(&m)?;
    let top = dec.values.iter().cloned().fold(0.0f64, f64::max);
    let cut = 1e-13 * top.max(f64::MIN_POSITIVE);
    let tr: f64 = dec
        .values
        .iter()
        .map(|&w| if w > cut { w.sqrt() } else { 0.0 })
        .sum();
    Ok((tr * tr / d2).clamp(0.0, 1.0))
}

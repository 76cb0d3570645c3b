//! Role-tagged dense operators and kets.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::CoreError;
use crate::linalg;
use crate::{CMat, CVec};

/// Structural role of an operator, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorRole {
    General,
    Hermitian,
    Unitary,
    Density,
    Projector,
}

/// Dense d x d complex operator with a validated role tag.
///
/// Tolerances: Hermitian 1e-12 per entry, unitary 1e-10 Frobenius,
/// density trace within 1e-10 and minimum eigenvalue >= -1e-10,
/// projector idempotency within 1e-10 Frobenius.
#[derive(Debug, Clone)]
pub struct QuditOperator {
    dim: usize,
    entries: CMat,
    role: OperatorRole,
}

impl QuditOperator {
    pub fn new(entries: CMat, role: OperatorRole) -> Result<Self, CoreError> {
        let dim = entries.nrows();
        if entries.ncols() != dim {
            return Err(CoreError::dim(format!(
                "operator must be square, got {}x{}",
                dim,
                entries.ncols()
            )));
        }
        let op = QuditOperator { dim, entries, role };
        op.validate()?;
        Ok(op)
    }

    pub fn general(entries: CMat) -> Self {
        let dim = entries.nrows();
        QuditOperator { dim, entries, role: OperatorRole::General }
    }

    pub fn hermitian(entries: CMat) -> Result<Self, CoreError> {
        Self::new(entries, OperatorRole::Hermitian)
    }

    pub fn unitary(entries: CMat) -> Result<Self, CoreError> {
        Self::new(entries, OperatorRole::Unitary)
    }

    pub fn density(entries: CMat) -> Result<Self, CoreError> {
        Self::new(entries, OperatorRole::Density)
    }

    pub fn projector(entries: CMat) -> Result<Self, CoreError> {
        Self::new(entries, OperatorRole::Projector)
    }

    pub fn identity(dim: usize) -> Self {
        QuditOperator { dim, entries: crate::linalg::identity(dim), role: OperatorRole::Projector }
    }

    pub fn zeros(dim: usize) -> Self {
        QuditOperator { dim, entries: Array2::zeros((dim, dim)), role: OperatorRole::Hermitian }
    }

    fn validate(&self) -> Result<(), CoreError> {
        match self.role {
            OperatorRole::General => Ok(()),
            OperatorRole::Hermitian => {
                let err = linalg::hermiticity_error(&self.entries);
                if err > 1e-12 * self.scale() {
                    return Err(CoreError::invariant(format!(
                        "hermitian tag violated, deviation {err:.3e}"
                    )));
                }
                Ok(())
            }
            OperatorRole::Unitary => {
                let uhu = linalg::dagger(&self.entries).dot(&self.entries);
                let dev = linalg::frobenius_norm(&(&uhu - &crate::linalg::identity(self.dim)));
                if dev > 1e-10 {
                    return Err(CoreError::invariant(format!(
                        "unitary tag violated, ||U^dag U - I|| = {dev:.3e}"
                    )));
                }
                Ok(())
            }
            OperatorRole::Density => {
                let herm = linalg::hermiticity_error(&self.entries);
                if herm > 1e-10 {
                    return Err(CoreError::invariant(format!(
                        "density must be Hermitian, deviation {herm:.3e}"
                    )));
                }
                let tr = linalg::trace(&self.entries);
                if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
                    return Err(CoreError::invariant(format!(
                        "density trace {tr} != 1"
                    )));
                }
                let dec = linalg::eigh(&self.entries)?;
                let min = dec.values.iter().cloned().fold(f64::INFINITY, f64::min);
                if min < -1e-10 {
                    return Err(CoreError::invariant(format!(
                        "density has negative eigenvalue {min:.3e}"
                    )));
                }
                Ok(())
            }
            OperatorRole::Projector => {
                let p2 = self.entries.dot(&self.entries);
                let dev = linalg::frobenius_norm(&(&p2 - &self.entries));
                if dev > 1e-10 {
                    return Err(CoreError::invariant(format!(
                        "projector tag violated, ||P^2 - P|| = {dev:.3e}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn scale(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(1.0f64, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn role(&self) -> OperatorRole {
        self.role
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    pub fn dagger(&self) -> CMat {
        linalg::dagger(&self.entries)
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.entries)
    }

    /// Rank of a projector, i.e. round(Tr P).
    pub fn projector_rank(&self) -> Result<usize, CoreError> {
        if self.role != OperatorRole::Projector {
            return Err(CoreError::arg("projector_rank on a non-projector"));
        }
        Ok(self.trace().re.round() as usize)
    }
}

/// Pure state vector.
#[derive(Debug, Clone)]
pub struct Ket {
    amplitudes: CVec,
}

impl Ket {
    /// A normalized ket; rejects vectors whose squared norm deviates from 1
    /// by more than 1e-12.
    pub fn normalized(amplitudes: CVec) -> Result<Self, CoreError> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > 1e-12 {
            return Err(CoreError::invariant(format!(
                "ket squared norm {n2} deviates from 1"
            )));
        }
        Ok(Ket { amplitudes })
    }

    /// Normalize and wrap; rejects the zero vector.
    pub fn from_unnormalized(amplitudes: CVec) -> Result<Self, CoreError> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if n2 <= 0.0 {
            return Err(CoreError::arg("cannot normalize the zero vector"));
        }
        let s = 1.0 / n2.sqrt();
        Ok(Ket { amplitudes: amplitudes.mapv(|z| z * s) })
    }

    /// Computational basis state |index> of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v: CVec = Array1::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ket { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amplitudes
    }

    /// |psi><psi| as a density operator.
    pub fn projector(&self) -> CMat {
        let d = self.dim();
        let mut out: CMat = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                out[[i, j]] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        out
    }

    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply(&self, u: &CMat) -> Ket {
        Ket { amplitudes: u.dot(&self.amplitudes) }
    }
}

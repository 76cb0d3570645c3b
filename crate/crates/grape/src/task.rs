//! Control task definitions and their fidelity bookkeeping.
//!
//! Every task's fidelity takes the form F = |Tr(M U)|^2 / k^2 for a fixed
//! matrix M and effective dimension k, which is what makes one gradient
//! engine serve all four task kinds.

use ndarray::Array2;
use qudit_core::linalg::{dagger, frobenius_norm};
use qudit_core::{CMat, Ket};

use crate::GrapeError;

#[derive(Debug, Clone)]
pub enum ControlTask {
    /// Map |initial> to |target>, leaving the rest of the space free.
    StateMap { initial: Ket, target: Ket },
    /// Realize `target` on the range of `projector` (rank ds), free elsewhere.
    SubspaceUnitary { target: CMat, projector: CMat, ds: usize },
    /// Map the orthonormal columns of `inputs` to the columns of `targets`.
    Isometry { inputs: CMat, targets: CMat },
    /// Realize the full d-dimensional unitary `target`.
    FullUnitary { target: CMat },
}

impl ControlTask {
    pub fn dim(&self) -> usize {
        match self {
            ControlTask::StateMap { initial, .. } => initial.dim(),
            ControlTask::SubspaceUnitary { target, .. } => target.nrows(),
            ControlTask::Isometry { inputs, .. } => inputs.nrows(),
            ControlTask::FullUnitary { target } => target.nrows(),
        }
    }

    /// Effective dimension k entering the fidelity normalization.
    pub fn effective_dim(&self) -> usize {
        match self {
            ControlTask::StateMap { .. } => 1,
            ControlTask::SubspaceUnitary { ds, .. } => *ds,
            ControlTask::Isometry { inputs, .. } => inputs.ncols(),
            ControlTask::FullUnitary { target } => target.nrows(),
        }
    }

    /// Minimum number of control phases needed to specify the task:
    /// 2d-2 for a state map, -ds^2 + 2 d ds - 1 for subspaces and
    /// isometries, d^2 - 1 for a full unitary.
    pub fn parameter_floor(&self) -> usize {
        let d = self.dim();
        match self {
            ControlTask::StateMap { .. } => 2 * d - 2,
            ControlTask::SubspaceUnitary { ds, .. } => 2 * d * ds - ds * ds - 1,
            ControlTask::Isometry { inputs, .. } => {
                let ds = inputs.ncols();
                2 * d * ds - ds * ds - 1
            }
            ControlTask::FullUnitary { .. } => d * d - 1,
        }
    }

    pub fn validate(&self) -> Result<(), GrapeError> {
        match self {
            ControlTask::StateMap { initial, target } => {
                if initial.dim() != target.dim() {
                    return Err(GrapeError::TaskMismatch("state map dims differ".into()));
                }
            }
            ControlTask::SubspaceUnitary { target, projector, ds } => {
                let d = target.nrows();
                if projector.nrows() != d {
                    return Err(GrapeError::TaskMismatch("projector dim mismatch".into()));
                }
                let p2 = projector.dot(projector);
                if frobenius_norm(&(&p2 - projector)) > 1e-10 {
                    return Err(GrapeError::TaskMismatch("projector not idempotent".into()));
                }
                let rank = qudit_core::linalg::trace(projector).re.round() as usize;
                if rank != *ds {
                    return Err(GrapeError::TaskMismatch(format!(
                        "projector rank {rank} != ds {ds}"
                    )));
                }
                // Target must act within the subspace: P W P = W on the block.
                let pwp = projector.dot(target).dot(projector);
                if frobenius_norm(&(&pwp - &projector.dot(target))) > 1e-8 * (*ds as f64) {
                    return Err(GrapeError::TaskMismatch(
                        "target does not preserve the subspace".into(),
                    ));
                }
            }
            ControlTask::Isometry { inputs, targets } => {
                if inputs.nrows() != targets.nrows() || inputs.ncols() != targets.ncols() {
                    return Err(GrapeError::TaskMismatch("isometry shapes differ".into()));
                }
                for (name, m) in [("inputs", inputs), ("targets", targets)] {
                    let g = dagger(m).dot(m);
                    let dev = frobenius_norm(&(&g - &qudit_core::linalg::identity(m.ncols())));
                    if dev > 1e-8 {
                        return Err(GrapeError::TaskMismatch(format!(
                            "{name} columns not orthonormal ({dev:.2e})"
                        )));
                    }
                }
            }
            ControlTask::FullUnitary { target } => {
                let g = dagger(target).dot(target);
                let dev = frobenius_norm(&(&g - &qudit_core::linalg::identity(target.nrows())));
                if dev > 1e-8 {
                    return Err(GrapeError::TaskMismatch(format!(
                        "target not unitary ({dev:.2e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The fixed matrix M with F = |Tr(M U)|^2 / k^2.
    pub fn overlap_matrix(&self) -> CMat {
        match self {
            ControlTask::StateMap { initial, target } => {
                // Tr(|i><f| U) = <f|U|i>
                let d = initial.dim();
                let mut m: CMat = Array2::zeros((d, d));
                for r in 0..d {
                    for c in 0..d {
                        m[[r, c]] = initial.amplitudes()[r] * target.amplitudes()[c].conj();
                    }
                }
                m
            }
            ControlTask::SubspaceUnitary { target, projector, .. } => {
                projector.dot(&dagger(target)).dot(projector)
            }
            ControlTask::Isometry { inputs, targets } => inputs.dot(&dagger(targets)),
            ControlTask::FullUnitary { target } => dagger(target),
        }
    }

    /// Fidelity of a realized unitary against this task.
    pub fn fidelity_of(&self, u: &CMat) -> f64 {
        let m = self.overlap_matrix();
        let k = self.effective_dim() as f64;
        let tr = qudit_core::linalg::trace(&m.dot(u));
        (tr.norm_sqr() / (k * k)).clamp(0.0, 1.0)
    }
}

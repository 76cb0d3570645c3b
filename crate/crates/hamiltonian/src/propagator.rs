//! Single-step propagators exp(-i H dt) through the spectral decomposition.

use qudit_core::linalg::{expm_i_hermitian, hermiticity_error};
use qudit_core::QuditOperator;

use crate::HamiltonianError;

/// exp(-i H dt) for a Hermitian step Hamiltonian.
pub fn step_propagator(h: &QuditOperator, dt: f64) -> Result<QuditOperator, HamiltonianError> {
    let scale = h
        .entries()
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    let herm = hermiticity_error(h.entries());
    if herm > 1e-10 * scale {
        return Err(HamiltonianError::InvalidParameter(format!(
            "step_propagator requires a Hermitian input (deviation {herm:.3e})"
        )));
    }
    let u = expm_i_hermitian(h.entries(), dt)?;
    Ok(QuditOperator::unitary(u)?)
}

/// The averaging theorem behind the corrected rotating-frame model requires
/// omega_rf * dt / pi to be an integer; returns whether `dt` is commensurate
/// within the given relative tolerance.
pub fn commensurate_steps(omega_rf: f64, dt: f64, rel_tol: f64) -> bool {
    let ratio = omega_rf * dt / std::f64::consts::PI;
    (ratio - ratio.round()).abs() <= rel_tol * ratio.abs().max(1.0)
}

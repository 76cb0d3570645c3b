//! Control Hamiltonian of the cesium ground-manifold qudit in the rotating
//! (transformed) frame: static Breit-Rabi part, phase-controlled rf and
//! microwave drives with optional corrections beyond the plain rotating-wave
//! approximation, AC-Stark light shifts, and single-step propagators.
//!
//! Everything is expressed in angular frequency units (rad/s, hbar = 1) in
//! the canonical 16-dimensional basis of `qudit_core::BasisLabel`.

pub mod angular;
pub mod builder;
pub mod constants;
pub mod light;
pub mod params;
pub mod propagator;

pub use angular::{clebsch_gordan, wigner3j, wigner6j};
pub use builder::{h_rf, h_rf_phase_gradients, h_static, h_total, h_uw, h_uw_phase_gradient};
pub use light::{differential_scalar_shift, light_shift};
pub use params::{HamiltonianParams, LightFieldParams, OpticalLine};
pub use propagator::{commensurate_steps, step_propagator};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing detuning for excited level F'={0}")]
    MissingDetuning(i32),

    #[error(transparent)]
    Core(#[from] qudit_core::CoreError),
}

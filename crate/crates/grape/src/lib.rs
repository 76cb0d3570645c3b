//! Gradient-ascent search for piecewise-constant phase waveforms driving the
//! cesium qudit: exact per-step propagator derivatives in the Hamiltonian
//! eigenbasis, four task fidelities (state map, subspace unitary, isometry,
//! full unitary), robustness averaging over parameter draws, and a
//! multi-start quasi-Newton ascent loop.

pub mod gradient;
pub mod objective;
pub mod propagate;
pub mod search;
pub mod task;
pub mod waveform;

pub use gradient::{cost, gradient, GradientReport};
pub use objective::{InhomogeneousObjective, Objective, RobustnessSpec, RobustObjective, TaskObjective};
pub use propagate::{propagate, EvalContext, Ramp};
pub use search::{search, SearchOptions, SearchResult};
pub use task::ControlTask;
pub use waveform::{ControlWaveform, WaveformHeader};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrapeError {
    #[error("invalid waveform: {0}")]
    InvalidWaveform(String),

    #[error("task/parameter mismatch: {0}")]
    TaskMismatch(String),

    #[error(transparent)]
    Hamiltonian(#[from] qudit_hamiltonian::HamiltonianError),

    #[error(transparent)]
    Core(#[from] qudit_core::CoreError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

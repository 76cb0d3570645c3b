//! Simulation of the full experimental sequence: state preparation and
//! measurement-map waveforms re-propagated under drawn control errors,
//! Stern-Gerlach signal synthesis and fitting, calibrated frequency noise,
//! and randomized benchmarking.

pub mod benchmark;
pub mod error_model;
pub mod record;
pub mod sequence;
pub mod sga;

pub use benchmark::{fidelity_decay_model, randomized_benchmark, BenchmarkPool, RbOutcome};
pub use error_model::{ErrorModel, ParameterDraw};
pub use record::MeasurementRecord;
pub use sequence::{ideal_frequencies, run_sequence, simulate_record, Measure, NoiseMode, Prep, Process, SequenceOptions};
pub use sga::{fit_sga, synthesize_sga, Manifold, SgaPeakModel};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error(transparent)]
    Core(#[from] qudit_core::CoreError),

    #[error(transparent)]
    Grape(#[from] qudit_grape::GrapeError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

/// Stable per-cell seed derivation so parallel and serial runs agree.
pub(crate) fn derive_seed(master: u64, lane: u64, index: u64) -> u64 {
    // splitmix64 over a combined word.
    let mut z = master
        .wrapping_add(lane.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

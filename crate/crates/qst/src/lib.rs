//! State reconstruction from measurement records: linear inversion,
//! constrained least squares, maximum likelihood and trace minimization,
//! plus the noise-level calibration that fixes the trace-minimization bound.

pub mod calibrate;
pub mod engine;
pub mod estimators;

pub use calibrate::{calibrate_epsilon, partial_record};
pub use engine::{Estimate, EstimatorConfig};
pub use estimators::{least_squares, linear_inversion, max_likelihood, trace_min, EpsilonMode, TraceMinOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QstError {
    #[error("record/construction mismatch: {0}")]
    Mismatch(String),

    #[error("construction is rank deficient: rank {rank} < {needed}")]
    RankDeficient { rank: usize, needed: usize },

    #[error("trace minimization infeasible: best attainable misfit {best_misfit:.6e} exceeds the bound {bound:.6e}")]
    TmInfeasible { best_misfit: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Core(#[from] qudit_core::CoreError),

    #[error(transparent)]
    Povm(#[from] qudit_povm::PovmError),
}

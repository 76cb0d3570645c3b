//! Process tomography: the process-matrix representation over the Hermitian
//! operator basis, intelligent probe states, the analytic unitary
//! reconstruction, the probe-frequency measurement model, and the
//! CP+TP-constrained least-squares estimator.

pub mod estimate;
pub mod model;
pub mod probe;
pub mod process;

pub use estimate::{estimate_process, ProcessEstimate, QptConfig};
pub use model::ProbeFrequencyModel;
pub use probe::{analytic_unitary_reconstruction, intelligent_probes};
pub use process::{apply_process, process_fidelity, unitary_to_chi, OperatorBasis, ProcessMatrix};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QptError {
    #[error("dimension mismatch: {0}")]
    Mismatch(String),

    #[error("invalid process matrix: {0}")]
    InvalidProcess(String),

    #[error("reconstruction failure: {0}")]
    Reconstruction(String),

    #[error(transparent)]
    Core(#[from] qudit_core::CoreError),
}

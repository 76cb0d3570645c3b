//! POVM constructions for qudit state tomography: mutually unbiased bases,
//! generalized Gell-Mann eigenbases, symmetric informationally complete
//! vectors, the minimal pure-state construction, polynomial bases, the
//! Neumark subspace embedding, and informational-completeness verification.

pub mod catalog;
pub mod construction;
pub mod gell_mann;
pub mod gf;
pub mod mub;
pub mod neumark;
pub mod poly;
pub mod psi;
pub mod sic;
pub mod verify;

pub use catalog::by_name;
pub use construction::{IcClass, PovmConstruction, PovmElement};
pub use gell_mann::gell_mann_bases;
pub use mub::{mub, mub_prime};
pub use neumark::{neumark_embed, NeumarkEmbedding};
pub use poly::polynomial_bases;
pub use psi::psi;
pub use sic::sic;
pub use verify::{verify_ic_class, IcReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PovmError {
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error(transparent)]
    Core(#[from] qudit_core::CoreError),

    #[error("serialization error: {0}")]
    Serde(String),
}

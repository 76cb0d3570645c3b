//! Dense complex linear algebra primitives for a 16-dimensional atomic qudit.
//!
//! This crate provides the shared foundation used by the Hamiltonian builder,
//! the waveform optimizer, the POVM generators and the tomography estimators:
//! operator and ket types with role validation, the canonical hyperfine basis
//! layout, fidelity functionals, Haar-random object generation, and a small
//! self-contained linear algebra kit (Hermitian eigendecomposition, QR,
//! cone/simplex projections, NNLS).
//!
//! All operations are pure functions of their inputs; values are immutable
//! after construction and safe to share across threads.

pub mod basis;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod opbasis;
pub mod operator;
pub mod random;
pub mod serialize;

pub use basis::{embed_block, embed_block_mat, spin_operators, BasisLabel};
pub use error::CoreError;
pub use fidelity::{isometry_fidelity, state_fidelity, subspace_fidelity, unitary_fidelity};
pub use linalg::{eigh, Eigh};
pub use operator::{Ket, OperatorRole, QuditOperator};
pub use random::{haar_random_state, haar_random_unitary};

use num_complex::Complex64;

/// Dense complex matrix, row-major.
pub type CMat = ndarray::Array2<Complex64>;
/// Dense complex vector.
pub type CVec = ndarray::Array1<Complex64>;

/// Hilbert space dimension of the full cesium ground manifold.
pub const QUDIT_DIM: usize = 16;

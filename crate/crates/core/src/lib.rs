//! Teleportation capability, GHZ-distillability and Mermin nonlocality of
//! three-qubit states.
//!
//! The crate is organised bottom-up:
//!
//! - [`matcore`]: small dense complex linear algebra (Kronecker products,
//!   partial traces and transposes, Hermitian eigensolver, trace norms).
//! - [`states`]: validated density matrices, Pauli decomposition, the GHZ
//!   basis and the four-parameter GHZ-diagonal family.
//! - [`telecap`]: fully entangled fraction and the per-party teleportation
//!   quantities `f_i`, `F_i`.
//! - [`distill`]: partial-transpose negativities and the NPT-on-every-cut test.
//! - [`mermin`]: Mermin operator, its expectation and its maximisation.
//! - [`protosim`]: Monte-Carlo simulation of the measure-then-teleport protocol.
//! - [`harness`]: seeded verification campaigns.

#![allow(clippy::needless_range_loop)]

pub mod distill;
pub mod error;
pub mod harness;
pub mod matcore;
pub mod mermin;
pub mod protosim;
pub mod rng;
pub mod states;
pub mod telecap;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, Party, RealMatrix3, C64};
pub use states::{GhzDiagonalParams, PauliDecomposition, ThreeQubitState};

//! Simulator for one-way (measurement-based) information transfer on standard
//! and decoherence-free-subspace cluster states under phase damping, together
//! with synthetic tomography: Poisson count generation, maximum-likelihood
//! state reconstruction, process tomography and channel fidelities.
//!
//! Qubits of the four-photon resource are ordered `1a, 1b, 2a, 2b` (indices
//! `0..4`), with qubit 0 the leftmost tensor factor.

// negated float comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod noise;
pub mod protocol;
pub mod qcore;
pub mod resource;
pub mod tomography;

pub use error::{Error, Result};

//! Characterizing single-photon quadrature tomography with phase-randomized
//! coherent states.
//!
//! The crate simulates homodyne records of phase-randomized coherent states,
//! calibrates and fits them, and applies decoy-state linear estimators to
//! recover the single-photon quadrature density, Wigner function and
//! density matrix.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod decoy;
pub mod error;
pub mod grid;
pub mod io;
pub mod minimize;
pub mod quantum_math;
pub mod reconstruct;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
pub use grid::UniformGrid;

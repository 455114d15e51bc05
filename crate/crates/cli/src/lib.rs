//! Command-line pipeline around `prcs_core`: simulate or load homodyne
//! records, calibrate, fit mean photon numbers, estimate the single-photon
//! marginal, reconstruct Wigner function and density matrix, and report.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod pipeline;
pub mod plots;

pub use config::{Overrides, PipelineConfig};
pub use error::{PipelineError, Result};
pub use pipeline::{calibrate, estimate, fit_mu, reconstruct, report, run, simulate, Layout};
pub use plots::emit_plot_data;

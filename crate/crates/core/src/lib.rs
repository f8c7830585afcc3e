//! Solvers and diagnostics for time-fractional phase-field equations.

// `!(x > 0.0)` is deliberate: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Frozen oracle values are kept at full printed precision.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod diagnostics;
pub mod error;
pub mod frac_kernel;
pub mod harness;
pub mod kernel_matrices;
pub mod models;
pub mod schemes;
pub mod spectral;

pub use error::{Error, Result};

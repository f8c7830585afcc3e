//! Configuration-driven experiments: single runs, kernel-matrix sweeps and
//! convergence studies.

pub mod config;
pub mod convergence;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::{InitialCondition, MeshSpec, RunConfig};
pub use run::{run, RunOutcome};

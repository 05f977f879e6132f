//! Command-line driver for the vertical-slice solver.

pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::{run, RunSummary};

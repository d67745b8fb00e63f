//! Batch experiment runner for the `netmimo` rate models.
//!
//! Each named experiment sweeps loading factor and/or cluster size, runs the
//! analytic engine, the simulator or both, and writes one CSV per curve plus
//! a JSON manifest that is sufficient to reproduce every file bitwise.

pub mod args;
pub mod error;
pub mod experiments;
pub mod output;
pub mod validation;

pub use error::{CliError, Result};
pub use experiments::{run_experiment, run_with_workers, ExperimentName, ExperimentOutput, ExperimentSpec, Method, RunRequest};
pub use output::{read_manifest, write_outputs, Manifest};

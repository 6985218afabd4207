//! Experiment runner behind the `timo-pigp` binary.
//!
//! Every command reads one JSON [`config::ExperimentConfig`], derives all of
//! its randomness from a single root seed ([`seeds`]) and records each file it
//! writes in a run manifest ([`manifest`]). Tabular outputs are CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod seeds;
pub mod study;

pub use config::ExperimentConfig;
pub use error::{CliError, ExitCode};

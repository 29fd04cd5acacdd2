//! Experiment runner library: declarative configs, named presets, and the
//! per-seed execution pipeline over the scheme registry.

pub mod config;
pub mod presets;
pub mod runner;

pub use config::{ExperimentConfig, load_config};
pub use runner::{run_experiment, CliError, ExperimentOutcome};

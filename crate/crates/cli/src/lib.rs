//! Experiment harness for the rebound delay-element simulator: experiment
//! configuration, drivers, and report export. The `rebound` binary wraps
//! these in a command-line interface.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::ExperimentConfig;
pub use report::{OutputFormat, Report};

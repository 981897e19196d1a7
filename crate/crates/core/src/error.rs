//! Error types shared by the simulation modules.

use thiserror::Error;

/// Errors raised by simulation and configuration-search routines.
#[derive(Debug, Clone, Error)]
pub enum SimError {
    /// A state variable left the representable range (NaN or infinity).
    #[error("numerical divergence in {unit} at t = {time_ms} ms")]
    NumericalDivergence {
        /// Which neuron or synapse diverged, e.g. `"neuron 2"`.
        unit: String,
        /// Simulation time at which the non-finite value was observed.
        time_ms: f64,
    },

    /// A stimulus references a spike source that is not part of the network.
    #[error("unknown spike source id {0}")]
    UnknownSource(u32),

    /// Structural or parameter validation failed.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A delay-configuration target lies outside the reachable band.
    #[error("unreachable target: {what} = {target} outside swept band [{lo}, {hi}]")]
    UnreachableTarget {
        what: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },

    /// A named preset was requested but not provided.
    #[error("missing preset entry: {0}")]
    MissingPreset(String),

    /// A trace window contained no samples.
    #[error("empty window: {0}")]
    EmptyWindow(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, SimError>;

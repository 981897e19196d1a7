//! Deterministic simulation of adaptive-exponential spiking neurons and
//! first-order dynamic synapses, built around disynaptic delay elements:
//! an inhibitory-excitatory synapse pair whose summed postsynaptic current
//! inhibits a neuron and then, after the inhibition decays, excites it.
//! Delayed excitation of this kind supports temporal feature detection by
//! coincidence, demonstrated here with a cricket-inspired interval detector
//! and polychronous pattern detectors.
//!
//! The crate provides:
//! - [`dynamics`]: forward-Euler kernels for the neuron and synapse models;
//! - [`delay`]: delay-element composition, response simulation, and
//!   weight-targeted configuration;
//! - [`stimgen`]: pulse and double-pulse spike-train generators with
//!   seeded phase noise;
//! - [`metrics`]: trace characterization (extrema, widths at half level,
//!   delay time) and detector classification;
//! - [`mismatch`]: seeded per-instance parameter sampling and population
//!   characterization;
//! - [`netsim`]: network assembly and fixed-step co-simulation;
//! - [`presets`]: tuned parameter sets for the shipped experiments.
//!
//! All kernels are generic over the scalar type via [`scalar::Scalar`];
//! the aliases at the crate root fix `f64`, which is what the experiment
//! harness uses.

pub mod delay;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod mismatch;
pub mod netsim;
pub mod presets;
pub mod rng;
pub mod scalar;
pub mod stimgen;
pub mod trace;

pub use error::{Result, SimError};
pub use scalar::Scalar;

/// `f64` aliases of the core model types, matching the precision the
/// experiment harness runs at.
pub type NeuronParams = dynamics::NeuronParams<f64>;
pub type NeuronState = dynamics::NeuronState<f64>;
pub type SynapseParams = dynamics::SynapseParams<f64>;
pub type SynapseState = dynamics::SynapseState<f64>;
pub type DelayElementConfig = delay::DelayElementConfig<f64>;
pub type DelayMetrics = metrics::DelayMetrics<f64>;
pub type SpikeTrain = stimgen::SpikeTrain<f64>;
pub type PulseSpec = stimgen::PulseSpec<f64>;
pub type Trace = trace::Trace<f64>;
pub type Network = netsim::Network<f64>;
pub type SimResult = netsim::SimResult<f64>;
pub type CricketPresets = netsim::CricketPresets<f64>;
pub type PolychronousPresets = netsim::PolychronousPresets<f64>;

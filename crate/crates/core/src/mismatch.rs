//! Device-mismatch emulation: seeded per-instance parameter sampling and
//! population-level characterization.
//!
//! Fabrication mismatch makes nominally identical analog neurons and
//! synapses behave as if their model parameters were drawn from a
//! distribution around the configured value. That is emulated here with
//! multiplicative draws: parameter `p` of instance `i` becomes
//! `nominal * factor(seed, i, "p")`. Draws are keyed by (seed, instance,
//! parameter name), so extending the parameter set later does not shift
//! existing draws.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::delay::{delay_response, DelayElementConfig};
use crate::dynamics::{NeuronParams, SynapseParams};
use crate::error::{Result, SimError};
use crate::metrics::{baseline_subtract, extract_metrics, DelayMetrics};
use crate::rng::{fnv1a, SplitMix64};
use crate::scalar::{lit, Scalar};
use crate::stimgen::SpikeTrain;

/// Smallest multiplicative factor a truncated-normal draw may produce;
/// keeps every positive parameter inside its invariant domain.
const TRUNCATION_FLOOR: f64 = 0.05;
const TRUNCATION_MAX_TRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchDistribution {
    /// Mean-preserving lognormal factors, the standard model for
    /// subthreshold-CMOS mismatch.
    Lognormal,
    /// Normal factors `1 + cv * z`, resampled away from non-positive
    /// values.
    TruncatedNormal,
}

/// Per-parameter coefficients of variation plus the sampling scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchSpec {
    pub distribution: MismatchDistribution,
    pub seed: u64,
    /// Keys are parameter paths such as `"neuron.leak_conductance"` or
    /// `"inh.weight"`; values are dimensionless CVs (>= 0). Parameters not
    /// listed keep their nominal value.
    pub cv: BTreeMap<String, f64>,
}

impl MismatchSpec {
    /// A spec with every CV zero: sampling returns exact copies.
    pub fn degenerate(seed: u64) -> Self {
        Self {
            distribution: MismatchDistribution::Lognormal,
            seed,
            cv: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, &cv) in &self.cv {
            if !(cv >= 0.0) {
                return Err(SimError::InvalidConfig(format!(
                    "mismatch cv for {name} must be >= 0"
                )));
            }
        }
        Ok(())
    }

    /// Multiplicative factor for one (instance, parameter) pair.
    fn factor(&self, instance: u64, name: &str) -> f64 {
        let cv = match self.cv.get(name) {
            Some(&c) if c > 0.0 => c,
            _ => return 1.0,
        };
        let mut rng = SplitMix64::from_keys(self.seed, &[instance, fnv1a(name)]);
        match self.distribution {
            MismatchDistribution::Lognormal => {
                // sigma chosen so the factor's mean is exactly 1 and its
                // coefficient of variation is cv.
                let sigma = (1.0 + cv * cv).ln().sqrt();
                (sigma * rng.standard_normal() - 0.5 * sigma * sigma).exp()
            }
            MismatchDistribution::TruncatedNormal => {
                for _ in 0..TRUNCATION_MAX_TRIES {
                    let f = 1.0 + cv * rng.standard_normal();
                    if f > TRUNCATION_FLOOR {
                        return f;
                    }
                }
                TRUNCATION_FLOOR
            }
        }
    }
}

fn neuron_fields<S: Scalar>() -> [(&'static str, fn(&mut NeuronParams<S>) -> &mut S); 7] {
    [
        ("capacitance", |p| &mut p.capacitance),
        ("leak_conductance", |p| &mut p.leak_conductance),
        ("adapt_tau", |p| &mut p.adapt_tau),
        ("adapt_conductance", |p| &mut p.adapt_conductance),
        ("adapt_increment", |p| &mut p.adapt_increment),
        ("refractory", |p| &mut p.refractory),
        ("injection_current", |p| &mut p.injection_current),
    ]
}

fn synapse_fields<S: Scalar>() -> [(&'static str, fn(&mut SynapseParams<S>) -> &mut S); 4] {
    [
        ("tau", |p| &mut p.tau),
        ("gain", |p| &mut p.gain),
        ("weight", |p| &mut p.weight),
        ("pulse_width", |p| &mut p.pulse_width),
    ]
}

fn apply_neuron<S: Scalar>(
    spec: &MismatchSpec,
    instance: u64,
    nominal: &NeuronParams<S>,
) -> NeuronParams<S> {
    let mut out = *nominal;
    for (field, access) in neuron_fields::<S>() {
        let name = format!("neuron.{field}");
        let f = spec.factor(instance, &name);
        if f != 1.0 {
            let slot = access(&mut out);
            *slot *= lit::<S>(f);
        }
    }
    out
}

fn apply_synapse<S: Scalar>(
    spec: &MismatchSpec,
    instance: u64,
    prefix: &str,
    nominal: &SynapseParams<S>,
) -> SynapseParams<S> {
    let mut out = *nominal;
    for (field, access) in synapse_fields::<S>() {
        let name = format!("{prefix}.{field}");
        let f = spec.factor(instance, &name);
        if f != 1.0 {
            let slot = access(&mut out);
            *slot *= lit::<S>(f);
        }
    }
    out
}

/// Draw `n` independent instances around the nominal neuron and delay
/// element. Instance `i` is a pure function of `(spec.seed, i, parameter)`.
pub fn sample_population<S: Scalar>(
    nominal_neuron: &NeuronParams<S>,
    nominal_delay: &DelayElementConfig<S>,
    n: usize,
    spec: &MismatchSpec,
) -> Result<Vec<(NeuronParams<S>, DelayElementConfig<S>)>> {
    spec.validate()?;
    if n == 0 {
        return Err(SimError::InvalidConfig(
            "population size must be >= 1".to_string(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let neuron = apply_neuron(spec, i, nominal_neuron);
        let mut delay = *nominal_delay;
        delay.inh = apply_synapse(spec, i, "inh", &nominal_delay.inh);
        delay.exc = apply_synapse(spec, i, "exc", &nominal_delay.exc);
        neuron.validate()?;
        delay.validate()?;
        out.push((neuron, delay));
    }
    Ok(out)
}

/// Fixed-width histogram with bin edges aligned to multiples of the width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub first_left: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn build(values: &[f64], bin_width: f64) -> Option<Self> {
        assert!(bin_width > 0.0);
        let first = values.first()?;
        let mut lo = *first;
        let mut hi = *first;
        for &v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let first_bin = (lo / bin_width).floor() as i64;
        let last_bin = (hi / bin_width).floor() as i64;
        let n_bins = (last_bin - first_bin + 1) as usize;
        let mut counts = vec![0u64; n_bins];
        for &v in values {
            let b = ((v / bin_width).floor() as i64 - first_bin) as usize;
            counts[b.min(n_bins - 1)] += 1;
        }
        Some(Self {
            bin_width,
            first_left: first_bin as f64 * bin_width,
            counts,
        })
    }

    /// (left, right, count) per bin, in order.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.counts.iter().enumerate().map(move |(i, &c)| {
            let left = self.first_left + i as f64 * self.bin_width;
            (left, left + self.bin_width, c)
        })
    }

    /// Left/right edges of the most populated bin (first on ties).
    pub fn mode_bin(&self) -> Option<(f64, f64)> {
        let (i, _) = self
            .counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
        let left = self.first_left + i as f64 * self.bin_width;
        Some((left, left + self.bin_width))
    }
}

/// Range and mode summary of one metric over the valid instances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub n_valid: usize,
    pub n_invalid: usize,
    pub min: f64,
    pub max: f64,
    pub mode_bin_left: f64,
    pub mode_bin_right: f64,
}

/// Metrics of one population instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetrics<S: Scalar> {
    pub instance: usize,
    pub metrics: DelayMetrics<S>,
    /// Set when the trace shows no usable excursion; such instances are
    /// reported, never silently dropped.
    pub no_excursion: bool,
}

/// Population characterization output: per-instance metrics plus
/// fixed-width histograms and min/max/mode summaries per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationCharacterization<S: Scalar> {
    pub instances: Vec<InstanceMetrics<S>>,
    pub histograms: BTreeMap<String, Histogram>,
    pub summaries: BTreeMap<String, MetricSummary>,
}

/// Histogram bin widths per metric, chosen to match the characterization
/// panel resolution: coarse for the potentials, fine for the times.
const PANELS: [(&str, f64); 5] = [
    ("v_max", 5.0),
    ("v_min", 10.0),
    ("tau_inh", 2.0),
    ("tau_exc", 2.0),
    ("tau_delay", 1.0),
];

/// Characterize every instance of a population under a common stimulus.
///
/// The stimulus is shifted right by `pre_roll` so a quiet window exists for
/// baseline estimation; traces are baseline-subtracted before metric
/// extraction.
pub fn population_characterize<S: Scalar>(
    population: &[(NeuronParams<S>, DelayElementConfig<S>)],
    stim: &SpikeTrain<S>,
    pre_roll: S,
    duration: S,
    dt: S,
) -> Result<PopulationCharacterization<S>> {
    if population.is_empty() {
        return Err(SimError::InvalidConfig(
            "population must be nonempty".to_string(),
        ));
    }
    let shifted = stim.shifted(pre_roll);
    let mut instances = Vec::with_capacity(population.len());
    for (i, (neuron, element)) in population.iter().enumerate() {
        let trace = delay_response(element, neuron, &shifted, duration + pre_roll, dt)?;
        let trace = baseline_subtract(&trace, pre_roll)?;
        let metrics = extract_metrics(&trace);
        instances.push(InstanceMetrics {
            instance: i,
            metrics,
            no_excursion: !metrics.valid_v_min && !metrics.valid_v_max,
        });
    }

    let mut histograms = BTreeMap::new();
    let mut summaries = BTreeMap::new();
    for (name, bin_width) in PANELS {
        let values: Vec<f64> = instances
            .iter()
            .filter_map(|im| metric_value(name, &im.metrics))
            .collect();
        let n_valid = values.len();
        let n_invalid = instances.len() - n_valid;
        if let Some(h) = Histogram::build(&values, bin_width) {
            let (mode_l, mode_r) = h.mode_bin().unwrap();
            summaries.insert(
                name.to_string(),
                MetricSummary {
                    n_valid,
                    n_invalid,
                    min: values.iter().copied().fold(f64::INFINITY, f64::min),
                    max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    mode_bin_left: mode_l,
                    mode_bin_right: mode_r,
                },
            );
            histograms.insert(name.to_string(), h);
        } else {
            summaries.insert(
                name.to_string(),
                MetricSummary {
                    n_valid: 0,
                    n_invalid,
                    min: f64::NAN,
                    max: f64::NAN,
                    mode_bin_left: f64::NAN,
                    mode_bin_right: f64::NAN,
                },
            );
        }
    }
    Ok(PopulationCharacterization {
        instances,
        histograms,
        summaries,
    })
}

fn metric_value<S: Scalar>(name: &str, m: &DelayMetrics<S>) -> Option<f64> {
    let (valid, value) = match name {
        "v_min" => (m.valid_v_min, m.v_min),
        "v_max" => (m.valid_v_max, m.v_max),
        "tau_inh" => (m.valid_tau_inh, m.tau_inh),
        "tau_exc" => (m.valid_tau_exc, m.tau_exc),
        "tau_delay" => (m.valid_tau_delay, m.tau_delay),
        _ => return None,
    };
    valid.then(|| value.to_f64_lossy())
}

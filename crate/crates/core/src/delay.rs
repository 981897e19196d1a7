//! Disynaptic delay elements: a fast subtractive-inhibitory and a slow
//! excitatory dynamic synapse on one neuron, summing to inhibition followed
//! by delayed excitation. The configuration routines exploit the
//! saturated-inhibition operating point, where the inhibition duration
//! follows the inhibitory weight and the rebound amplitude follows the
//! excitatory weight.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{NeuronParams, Polarity, SynapseParams, SynapseState};
use crate::error::{Result, SimError};
use crate::metrics::{extract_metrics, DelayMetrics};
use crate::netsim::{simulate, Network, NeuronId, PreId, SourceId, Synapse};
use crate::scalar::{lit, Scalar};
use crate::stimgen::{delay_stim, SpikeTrain};
use crate::trace::Trace;

/// One delay element: the synapse pair plus its configuration stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayElementConfig<S: Scalar> {
    /// Fast inhibitory synapse of the pair.
    pub inh: SynapseParams<S>,
    /// Slow excitatory synapse of the pair.
    pub exc: SynapseParams<S>,
    /// Number of spikes in the configuration stimulus.
    pub n_stim_spikes: usize,
    /// Window the configuration stimulus spans (ms).
    pub stim_window: S,
}

impl<S: Scalar> DelayElementConfig<S> {
    pub fn validate(&self) -> Result<()> {
        self.inh.validate()?;
        self.exc.validate()?;
        if self.inh.polarity != Polarity::Inhibitory {
            return Err(SimError::InvalidConfig(
                "delay element inh synapse must be inhibitory".to_string(),
            ));
        }
        if self.exc.polarity != Polarity::Excitatory {
            return Err(SimError::InvalidConfig(
                "delay element exc synapse must be excitatory".to_string(),
            ));
        }
        if self.n_stim_spikes == 0 {
            return Err(SimError::InvalidConfig(
                "delay element stimulus needs at least one spike".to_string(),
            ));
        }
        Ok(())
    }

    /// The configuration stimulus: `n_stim_spikes` spikes evenly spanning
    /// the stimulus window.
    pub fn stimulus(&self) -> Result<SpikeTrain<S>> {
        delay_stim(self.n_stim_spikes, self.stim_window)
    }
}

/// Net postsynaptic current of the pair plus any additional fast
/// excitatory current (the direct input pathway): inhibition subtracts.
pub fn summed_psc<S: Scalar>(
    inh_state: &SynapseState<S>,
    exc_state: &SynapseState<S>,
    extra_exc: S,
) -> S {
    extra_exc + exc_state.current - inh_state.current
}

/// Membrane response of a single neuron receiving only the delay element.
///
/// Returns the baseline-relative membrane trace of the postsynaptic neuron
/// under the given stimulus. The canonical presets keep the response
/// subthreshold, so the trace is smooth and the characterization metrics
/// are well defined.
pub fn delay_response<S: Scalar>(
    config: &DelayElementConfig<S>,
    neuron: &NeuronParams<S>,
    stim: &SpikeTrain<S>,
    duration: S,
    dt: S,
) -> Result<Trace<S>> {
    config.validate()?;
    let post = NeuronId(0);
    let src = SourceId(0);
    let net = Network {
        neurons: vec![(post, *neuron)],
        synapses: vec![
            Synapse {
                pre: PreId::Source(src),
                post,
                params: config.inh,
            },
            Synapse {
                pre: PreId::Source(src),
                post,
                params: config.exc,
            },
        ],
        sources: vec![src],
    };
    let mut stimuli = BTreeMap::new();
    if !stim.is_empty() {
        stimuli.insert(src, stim.clone());
    }
    let result = simulate(&net, &stimuli, duration, dt, &[post])?;
    Ok(result.traces.into_iter().next().map(|(_, tr)| tr).unwrap())
}

/// Simulate the element under its own configuration stimulus and extract
/// the characterization metrics.
pub fn measure_element<S: Scalar>(
    config: &DelayElementConfig<S>,
    neuron: &NeuronParams<S>,
    duration: S,
    dt: S,
) -> Result<DelayMetrics<S>> {
    let stim = config.stimulus()?;
    let trace = delay_response(config, neuron, &stim, duration, dt)?;
    Ok(extract_metrics(&trace))
}

/// One row of a weight sweep: the weights applied and the metrics measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<S: Scalar> {
    pub w_inh: S,
    pub w_exc: S,
    pub metrics: DelayMetrics<S>,
}

/// Measure the element over a cartesian grid of inhibitory and excitatory
/// weights. Rows are ordered by (w_inh index, w_exc index).
pub fn sweep_weights<S: Scalar>(
    base: &DelayElementConfig<S>,
    neuron: &NeuronParams<S>,
    w_inh_values: &[S],
    w_exc_values: &[S],
    duration: S,
    dt: S,
) -> Result<Vec<SweepPoint<S>>> {
    let mut points = Vec::with_capacity(w_inh_values.len() * w_exc_values.len());
    for &w_inh in w_inh_values {
        for &w_exc in w_exc_values {
            let mut cfg = *base;
            cfg.inh.weight = w_inh;
            cfg.exc.weight = w_exc;
            let metrics = measure_element(&cfg, neuron, duration, dt)?;
            points.push(SweepPoint {
                w_inh,
                w_exc,
                metrics,
            });
        }
    }
    Ok(points)
}

/// Tolerances met by a successful [`configure_delay`] call.
pub const TAU_TOLERANCE_MS: f64 = 5.0;
pub const V_MAX_TOLERANCE_MV: f64 = 10.0;
const BISECTION_MAX_ITER: usize = 40;
const CONFIGURE_ROUNDS: usize = 4;

#[derive(Clone, Copy)]
enum TauMetric {
    /// Full width at half minimum (inhibition duration).
    Inh,
    /// Onset-to-onset delay time.
    Delay,
}

fn tau_of<S: Scalar>(metric: TauMetric, m: &DelayMetrics<S>) -> S {
    match metric {
        TauMetric::Inh => {
            if m.valid_tau_inh {
                m.tau_inh
            } else {
                S::zero()
            }
        }
        TauMetric::Delay => {
            if m.valid_tau_delay {
                m.tau_delay
            } else {
                S::zero()
            }
        }
    }
}

fn v_max_of<S: Scalar>(m: &DelayMetrics<S>) -> S {
    if m.valid_v_max {
        m.v_max
    } else {
        S::zero()
    }
}

/// Simulation horizon used while configuring: long enough for the slowest
/// elements in the reachable band to complete their rebound.
fn configure_duration<S: Scalar>(config: &DelayElementConfig<S>) -> S {
    let slow = config.inh.tau.max(config.exc.tau);
    (config.stim_window + slow * lit(8.0)).max(lit(300.0))
}

fn bisect_weight<S: Scalar>(
    what: &'static str,
    target: S,
    band: (S, S),
    tolerance: S,
    mut eval: impl FnMut(S) -> Result<S>,
) -> Result<S> {
    let (mut lo, mut hi) = band;
    let f_lo = eval(lo)?;
    let f_hi = eval(hi)?;
    if target < f_lo - tolerance || target > f_hi + tolerance {
        return Err(SimError::UnreachableTarget {
            what,
            target: target.to_f64_lossy(),
            lo: f_lo.to_f64_lossy(),
            hi: f_hi.to_f64_lossy(),
        });
    }
    let mut best = lo;
    let mut best_err = (f_lo - target).abs();
    if (f_hi - target).abs() < best_err {
        best = hi;
        best_err = (f_hi - target).abs();
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = (lo + hi) / lit(2.0);
        let f_mid = eval(mid)?;
        let err = (f_mid - target).abs();
        if err < best_err {
            best = mid;
            best_err = err;
        }
        if f_mid < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / hi.max(S::epsilon()) < lit(1e-4) {
            break;
        }
    }
    Ok(best)
}

fn configure_element<S: Scalar>(
    metric: TauMetric,
    target_tau: S,
    target_v_max: S,
    base: &DelayElementConfig<S>,
    neuron: &NeuronParams<S>,
    band: (S, S),
    dt: S,
) -> Result<DelayElementConfig<S>> {
    base.validate()?;
    if !(band.0 > S::zero() && band.0 < band.1) {
        return Err(SimError::InvalidConfig(
            "search band multipliers must satisfy 0 < lo < hi".to_string(),
        ));
    }
    let duration = configure_duration(base);
    let tau_tol = lit::<S>(TAU_TOLERANCE_MS);
    let v_tol = lit::<S>(V_MAX_TOLERANCE_MV);

    // Fast path: the base already satisfies both targets.
    let m0 = measure_element(base, neuron, duration, dt)?;
    if (tau_of(metric, &m0) - target_tau).abs() <= tau_tol
        && (v_max_of(&m0) - target_v_max).abs() <= v_tol
    {
        return Ok(*base);
    }

    let mut cfg = *base;
    let inh_band = (base.inh.weight * band.0, base.inh.weight * band.1);
    let exc_band = (base.exc.weight * band.0, base.exc.weight * band.1);

    for round in 0..CONFIGURE_ROUNDS {
        let w_inh = bisect_weight("tau", target_tau, inh_band, tau_tol, |w| {
            let mut c = cfg;
            c.inh.weight = w;
            Ok(tau_of(metric, &measure_element(&c, neuron, duration, dt)?))
        })?;
        cfg.inh.weight = w_inh;

        let w_exc = bisect_weight("v_max", target_v_max, exc_band, v_tol, |w| {
            let mut c = cfg;
            c.exc.weight = w;
            Ok(v_max_of(&measure_element(&c, neuron, duration, dt)?))
        })?;
        cfg.exc.weight = w_exc;

        let m = measure_element(&cfg, neuron, duration, dt)?;
        let tau_ok = (tau_of(metric, &m) - target_tau).abs() <= tau_tol;
        let v_ok = (v_max_of(&m) - target_v_max).abs() <= v_tol;
        if tau_ok && v_ok {
            return Ok(cfg);
        }
        if round + 1 == CONFIGURE_ROUNDS {
            let (what, target, got) = if tau_ok {
                ("v_max", target_v_max, v_max_of(&m))
            } else {
                ("tau", target_tau, tau_of(metric, &m))
            };
            return Err(SimError::UnreachableTarget {
                what,
                target: target.to_f64_lossy(),
                lo: got.to_f64_lossy(),
                hi: got.to_f64_lossy(),
            });
        }
    }
    unreachable!("configure rounds exhausted");
}

/// Find weights so the element's inhibition duration and rebound amplitude
/// match the targets, by monotone bisection on the inhibitory then the
/// excitatory weight inside `band` (multipliers of the base weights).
///
/// Sound in the saturated-inhibition operating point, where the two
/// controls decouple; tolerances are 5 ms and 10 mV.
pub fn configure_delay<S: Scalar>(
    target_tau_inh: S,
    target_v_max: S,
    base: &DelayElementConfig<S>,
    neuron: &NeuronParams<S>,
    band: (S, S),
    dt: S,
) -> Result<DelayElementConfig<S>> {
    configure_element(
        TauMetric::Inh,
        target_tau_inh,
        target_v_max,
        base,
        neuron,
        band,
        dt,
    )
}

/// Like [`configure_delay`] but targeting the onset-to-onset delay time,
/// which is what polychronous pattern construction needs.
pub fn configure_delay_for_tau_delay<S: Scalar>(
    target_tau_delay: S,
    target_v_max: S,
    base: &DelayElementConfig<S>,
    neuron: &NeuronParams<S>,
    band: (S, S),
    dt: S,
) -> Result<DelayElementConfig<S>> {
    configure_element(
        TauMetric::Delay,
        target_tau_delay,
        target_v_max,
        base,
        neuron,
        band,
        dt,
    )
}

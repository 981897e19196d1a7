//! Directed networks of neurons and typed synapses with synchronous
//! fixed-step co-simulation.
//!
//! The engine is deliberately a plain synchronous stepper: the metrics
//! module needs traces at uniform resolution, and the networks here are a
//! handful of units, so event-driven bookkeeping would buy nothing. A spike
//! emitted at step `k` first influences postsynaptic currents at step
//! `k + 1`; all temporal structure beyond that one-step latency comes from
//! the synapse dynamics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::delay::DelayElementConfig;
use crate::dynamics::{
    adex_step, dpi_receive_spike, dpi_step, NeuronParams, NeuronState, Polarity, SynapseParams,
    SynapseState,
};
use crate::error::{Result, SimError};
use crate::scalar::Scalar;
use crate::stimgen::SpikeTrain;
use crate::trace::Trace;

/// Soft fan-in limit mirroring the 64-entry presynaptic address memory of
/// the hardware each neuron models. Exceeding it is a validation warning,
/// not an error.
pub const FAN_IN_SOFT_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NeuronId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceId(pub u32);

/// Presynaptic endpoint of a synapse: an external spike source or a neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreId {
    Source(SourceId),
    Neuron(NeuronId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Synapse<S: Scalar> {
    pub pre: PreId,
    pub post: NeuronId,
    pub params: SynapseParams<S>,
}

/// A directed network: neurons, typed synapses, and external spike sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network<S: Scalar> {
    pub neurons: Vec<(NeuronId, NeuronParams<S>)>,
    pub synapses: Vec<Synapse<S>>,
    pub sources: Vec<SourceId>,
}

impl<S: Scalar> Network<S> {
    /// Validate ids and parameters. Returns warnings (currently only the
    /// fan-in soft limit) on success.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut neuron_ids = std::collections::BTreeSet::new();
        for (id, params) in &self.neurons {
            if !neuron_ids.insert(*id) {
                return Err(SimError::InvalidConfig(format!(
                    "duplicate neuron id {}",
                    id.0
                )));
            }
            params.validate()?;
        }
        let mut source_ids = std::collections::BTreeSet::new();
        for id in &self.sources {
            if !source_ids.insert(*id) {
                return Err(SimError::InvalidConfig(format!(
                    "duplicate source id {}",
                    id.0
                )));
            }
        }
        let mut fan_in: BTreeMap<NeuronId, usize> = BTreeMap::new();
        for syn in &self.synapses {
            syn.params.validate()?;
            match syn.pre {
                PreId::Source(s) if !source_ids.contains(&s) => {
                    return Err(SimError::InvalidConfig(format!(
                        "synapse references unknown source {}",
                        s.0
                    )));
                }
                PreId::Neuron(n) if !neuron_ids.contains(&n) => {
                    return Err(SimError::InvalidConfig(format!(
                        "synapse references unknown presynaptic neuron {}",
                        n.0
                    )));
                }
                _ => {}
            }
            if !neuron_ids.contains(&syn.post) {
                return Err(SimError::InvalidConfig(format!(
                    "synapse references unknown postsynaptic neuron {}",
                    syn.post.0
                )));
            }
            *fan_in.entry(syn.post).or_insert(0) += 1;
        }
        let mut warnings = Vec::new();
        for (id, n) in fan_in {
            if n > FAN_IN_SOFT_LIMIT {
                warnings.push(format!(
                    "neuron {} has fan-in {n}, above the hardware soft limit of {FAN_IN_SOFT_LIMIT}",
                    id.0
                ));
            }
        }
        Ok(warnings)
    }
}

/// Simulation output: per-neuron spike times and optional baseline-relative
/// membrane traces at step resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult<S: Scalar> {
    pub spikes: BTreeMap<u32, Vec<S>>,
    pub traces: BTreeMap<u32, Trace<S>>,
    pub dt: S,
    pub duration: S,
}

impl<S: Scalar> SimResult<S> {
    pub fn spikes_of(&self, id: NeuronId) -> &[S] {
        self.spikes.get(&id.0).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn trace_of(&self, id: NeuronId) -> Option<&Trace<S>> {
        self.traces.get(&id.0)
    }
}

/// Run the network for `duration` at fixed step `dt`, driving the listed
/// sources with their spike trains and recording membrane traces for the
/// neurons in `record`.
///
/// Stepping order within a step: deliver due spikes to synapses, step all
/// synapses, sum postsynaptic currents by polarity (inhibition subtracts),
/// step all neurons, and queue emitted spikes for delivery at the next
/// step. Identical inputs produce bit-identical results.
pub fn simulate<S: Scalar>(
    net: &Network<S>,
    stimuli: &BTreeMap<SourceId, SpikeTrain<S>>,
    duration: S,
    dt: S,
    record: &[NeuronId],
) -> Result<SimResult<S>> {
    if !(dt > S::zero()) {
        return Err(SimError::InvalidConfig("dt must be > 0".to_string()));
    }
    net.validate()?;
    for (sid, train) in stimuli {
        if !net.sources.contains(sid) {
            return Err(SimError::UnknownSource(sid.0));
        }
        if train
            .times()
            .iter()
            .any(|&t| t < S::zero() || t >= duration)
        {
            return Err(SimError::InvalidConfig(format!(
                "stimulus for source {} has spike times outside [0, duration)",
                sid.0
            )));
        }
    }

    let n_neurons = net.neurons.len();
    let neuron_index: BTreeMap<NeuronId, usize> = net
        .neurons
        .iter()
        .enumerate()
        .map(|(i, (id, _))| (*id, i))
        .collect();

    // Synapse indices grouped by presynaptic endpoint.
    let mut by_source: BTreeMap<SourceId, Vec<usize>> = BTreeMap::new();
    let mut by_neuron: Vec<Vec<usize>> = vec![Vec::new(); n_neurons];
    for (si, syn) in net.synapses.iter().enumerate() {
        match syn.pre {
            PreId::Source(s) => by_source.entry(s).or_default().push(si),
            PreId::Neuron(n) => by_neuron[neuron_index[&n]].push(si),
        }
    }
    let post_index: Vec<usize> = net
        .synapses
        .iter()
        .map(|syn| neuron_index[&syn.post])
        .collect();

    let mut syn_states: Vec<SynapseState<S>> = vec![SynapseState::idle(); net.synapses.len()];
    let mut neuron_states: Vec<NeuronState<S>> = net
        .neurons
        .iter()
        .map(|(_, p)| NeuronState::resting(p))
        .collect();
    let baselines: Vec<S> = net
        .neurons
        .iter()
        .map(|(_, p)| p.resting_potential())
        .collect();

    // Per-source cursor into its spike train.
    let mut cursors: BTreeMap<SourceId, usize> = stimuli.keys().map(|s| (*s, 0usize)).collect();

    let steps = (duration / dt).ceil().to_usize().unwrap_or(0);
    let mut traces: BTreeMap<u32, Vec<S>> = record
        .iter()
        .map(|id| (id.0, Vec::with_capacity(steps + 1)))
        .collect();
    for (&id, buf) in traces.iter_mut() {
        let i = neuron_index[&NeuronId(id)];
        buf.push(neuron_states[i].v - baselines[i]);
    }

    let mut spikes: BTreeMap<u32, Vec<S>> = net
        .neurons
        .iter()
        .map(|(id, _)| (id.0, Vec::new()))
        .collect();
    let mut pending: Vec<usize> = Vec::new(); // neuron indices that spiked last step

    for k in 0..steps {
        let t = dt * S::from_usize(k).unwrap();

        // 1. Deliver due external spikes (start-of-step quantization).
        for (sid, train) in stimuli {
            let cursor = cursors.get_mut(sid).unwrap();
            let times = train.times();
            let step_end = dt * S::from_usize(k + 1).unwrap();
            while *cursor < times.len() && times[*cursor] < step_end {
                if let Some(syn_ids) = by_source.get(sid) {
                    for &si in syn_ids {
                        syn_states[si] =
                            dpi_receive_spike(&syn_states[si], &net.synapses[si].params, t);
                    }
                }
                *cursor += 1;
            }
        }
        // Deliver neuron spikes emitted in the previous step.
        for &ni in &pending {
            for &si in &by_neuron[ni] {
                syn_states[si] = dpi_receive_spike(&syn_states[si], &net.synapses[si].params, t);
            }
        }
        pending.clear();

        // 2. Step all synapses.
        for (si, syn) in net.synapses.iter().enumerate() {
            syn_states[si] = dpi_step(&syn_states[si], &syn.params, t, dt)
                .map_err(|e| rename_divergence(e, format!("synapse {si}")))?;
        }

        // 3. Sum postsynaptic currents, inhibition subtracting.
        let mut psc: Vec<S> = vec![S::zero(); n_neurons];
        for (si, syn) in net.synapses.iter().enumerate() {
            let i = post_index[si];
            match syn.params.polarity {
                Polarity::Excitatory => psc[i] += syn_states[si].current,
                Polarity::Inhibitory => psc[i] -= syn_states[si].current,
            }
        }

        // 4. Step all neurons; collect spikes for next-step delivery.
        for (ni, (id, params)) in net.neurons.iter().enumerate() {
            let (next, spiked) = adex_step(&neuron_states[ni], params, psc[ni], t, dt)
                .map_err(|e| rename_divergence(e, format!("neuron {}", id.0)))?;
            neuron_states[ni] = next;
            if spiked {
                spikes.get_mut(&id.0).unwrap().push(t);
                pending.push(ni);
            }
        }

        // 5. Record traces.
        for (&id, buf) in traces.iter_mut() {
            let i = neuron_index[&NeuronId(id)];
            buf.push(neuron_states[i].v - baselines[i]);
        }
    }

    Ok(SimResult {
        spikes,
        traces: traces
            .into_iter()
            .map(|(id, samples)| (id, Trace::new(S::zero(), dt, samples)))
            .collect(),
        dt,
        duration,
    })
}

fn rename_divergence(e: SimError, unit: String) -> SimError {
    match e {
        SimError::NumericalDivergence { time_ms, .. } => {
            SimError::NumericalDivergence { unit, time_ms }
        }
        other => other,
    }
}

/// Neuron ids of the cricket feature-detection circuit built by
/// [`build_cricket_circuit`].
pub const LN2: NeuronId = NeuronId(0);
pub const LN3: NeuronId = NeuronId(1);
pub const LN4: NeuronId = NeuronId(2);
/// External source id representing the ascending neuron AN1.
pub const AN1: SourceId = SourceId(0);

/// Parameter blocks required to instantiate the cricket circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CricketPresets<S: Scalar> {
    pub ln2_neuron: NeuronParams<S>,
    pub ln3_neuron: NeuronParams<S>,
    pub ln4_neuron: NeuronParams<S>,
    /// AN1 -> LN2 fast excitatory input synapse.
    pub an1_ln2: SynapseParams<S>,
    /// AN1 -> LN3 fast excitatory input synapse (direct pathway).
    pub an1_ln3: SynapseParams<S>,
    /// LN2 -> LN3 delay element (inhibitory fast + excitatory slow pair).
    pub delay: DelayElementConfig<S>,
    /// LN3 -> LN4 fast excitatory synapse.
    pub ln3_ln4: SynapseParams<S>,
    /// LN2 -> LN4 subtractive inhibitory synapse.
    pub ln2_ln4: SynapseParams<S>,
}

/// Wire the four-unit feature-detection circuit: one external source
/// fanning to LN2 and LN3, the delay-element pair from LN2 onto LN3, the
/// excitatory projection LN3 -> LN4, and the inhibitory projection
/// LN2 -> LN4.
pub fn build_cricket_circuit<S: Scalar>(presets: &CricketPresets<S>) -> Result<Network<S>> {
    if presets.delay.inh.polarity != Polarity::Inhibitory
        || presets.delay.exc.polarity != Polarity::Excitatory
    {
        return Err(SimError::InvalidConfig(
            "delay element polarity mismatch".to_string(),
        ));
    }
    let net = Network {
        neurons: vec![
            (LN2, presets.ln2_neuron),
            (LN3, presets.ln3_neuron),
            (LN4, presets.ln4_neuron),
        ],
        synapses: vec![
            Synapse {
                pre: PreId::Source(AN1),
                post: LN2,
                params: presets.an1_ln2,
            },
            Synapse {
                pre: PreId::Source(AN1),
                post: LN3,
                params: presets.an1_ln3,
            },
            Synapse {
                pre: PreId::Neuron(LN2),
                post: LN3,
                params: presets.delay.inh,
            },
            Synapse {
                pre: PreId::Neuron(LN2),
                post: LN3,
                params: presets.delay.exc,
            },
            Synapse {
                pre: PreId::Neuron(LN3),
                post: LN4,
                params: presets.ln3_ln4,
            },
            Synapse {
                pre: PreId::Neuron(LN2),
                post: LN4,
                params: presets.ln2_ln4,
            },
        ],
        sources: vec![AN1],
    };
    net.validate()?;
    Ok(net)
}

/// Parameter blocks for polychronous pattern-detection networks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolychronousPresets<S: Scalar> {
    /// Detector neuron operated in saturated-inhibition mode.
    pub detector_neuron: NeuronParams<S>,
    /// Base delay element whose weights the per-edge configuration refines.
    pub base_element: DelayElementConfig<S>,
    /// Rebound amplitude every edge is normalized to (mV).
    pub v_max_target: S,
    /// Weight search band for the per-edge configuration, as (lo, hi)
    /// multipliers of the base weights.
    pub search_band: (S, S),
}

/// Build a polychronous detector network: `delays[j][i]` is the target
/// delay time (ms) of the element from source `i` onto detector `j`. Each
/// edge is realized by configuring a copy of the base element so its
/// measured delay matches the target and its rebound amplitude matches the
/// preset's common target.
pub fn build_polychronous<S: Scalar>(
    sources: usize,
    detectors: usize,
    delays: &[Vec<S>],
    presets: &PolychronousPresets<S>,
    dt: S,
) -> Result<Network<S>> {
    if delays.len() != detectors || delays.iter().any(|row| row.len() != sources) {
        return Err(SimError::InvalidConfig(
            "delay matrix shape must be detectors x sources".to_string(),
        ));
    }
    let mut net = Network {
        neurons: (0..detectors)
            .map(|j| (NeuronId(j as u32), presets.detector_neuron))
            .collect(),
        synapses: Vec::new(),
        sources: (0..sources).map(|i| SourceId(i as u32)).collect(),
    };
    for (j, row) in delays.iter().enumerate() {
        for (i, &target) in row.iter().enumerate() {
            let element = crate::delay::configure_delay_for_tau_delay(
                target,
                presets.v_max_target,
                &presets.base_element,
                &presets.detector_neuron,
                presets.search_band,
                dt,
            )?;
            net.synapses.push(Synapse {
                pre: PreId::Source(SourceId(i as u32)),
                post: NeuronId(j as u32),
                params: element.inh,
            });
            net.synapses.push(Synapse {
                pre: PreId::Source(SourceId(i as u32)),
                post: NeuronId(j as u32),
                params: element.exc,
            });
        }
    }
    net.validate()?;
    Ok(net)
}

//! Feature-detection circuit behavior: quiescence, single- and double-pulse
//! responses, ablation, delivery latency, and step-size robustness.

use std::collections::BTreeMap;

use rebound_core::metrics::count_spikes;
use rebound_core::netsim::{
    build_cricket_circuit, build_polychronous, simulate, Network, NeuronId, PreId, SourceId,
    Synapse, AN1, LN2, LN3, LN4,
};
use rebound_core::presets;
use rebound_core::stimgen::{double_pulse, pulse, PulseSpec};
use rebound_core::{SimResult, SpikeTrain};

const DT: f64 = 0.01;

fn run_circuit(net: &Network<f64>, stim: SpikeTrain, record: &[NeuronId], dt: f64) -> SimResult {
    let duration = stim.last().unwrap_or(0.0) + 80.0;
    let mut stimuli = BTreeMap::new();
    stimuli.insert(AN1, stim);
    simulate(net, &stimuli, duration, dt, record).unwrap()
}

fn spec(ipi: f64) -> PulseSpec<f64> {
    PulseSpec {
        ipi,
        ..PulseSpec::default()
    }
}

#[test]
fn circuit_structure_matches_wiring() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    assert_eq!(net.neurons.len(), 3);
    assert_eq!(net.sources.len(), 1);
    assert_eq!(net.synapses.len(), 6);
    // One inhibitory-excitatory pair from LN2 onto LN3.
    let ln2_ln3: Vec<_> = net
        .synapses
        .iter()
        .filter(|s| s.pre == PreId::Neuron(LN2) && s.post == LN3)
        .collect();
    assert_eq!(ln2_ln3.len(), 2);
}

#[test]
fn grid_point_changes_only_the_weight() {
    let base = presets::cricket::<f64>();
    let mut variant = base.clone();
    variant.an1_ln3.weight = 1234.0;
    let a = build_cricket_circuit(&base).unwrap();
    let b = build_cricket_circuit(&variant).unwrap();
    assert_eq!(a.synapses.len(), b.synapses.len());
    for (x, y) in a.synapses.iter().zip(&b.synapses) {
        assert_eq!(x.pre, y.pre);
        assert_eq!(x.post, y.post);
        if x.pre == PreId::Source(AN1) && x.post == LN3 {
            assert_eq!(y.params.weight, 1234.0);
        } else {
            assert_eq!(x.params, y.params);
        }
    }
}

#[test]
fn no_stimulus_means_no_spikes() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    let out = simulate(&net, &BTreeMap::new(), 200.0, DT, &[]).unwrap();
    for id in [LN2, LN3, LN4] {
        assert!(out.spikes_of(id).is_empty());
    }
}

#[test]
fn single_pulse_inhibits_then_rebounds_without_detection() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    let stim = pulse(&spec(0.0)).unwrap();
    let out = run_circuit(&net, stim, &[LN3], DT);

    let ln2 = out.spikes_of(LN2);
    assert!(
        (4..=5).contains(&ln2.len()),
        "LN2 fired {} spikes for one pulse",
        ln2.len()
    );
    // LN3 dips below baseline during the pulse, rebounds above it after,
    // and stays subthreshold for a lone pulse.
    let trace = out.trace_of(LN3).unwrap();
    let during = trace.index_range(5.0, 20.0);
    let min_during = trace.samples[during]
        .iter()
        .cloned()
        .fold(f64::MAX, f64::min);
    assert!(min_during < -20.0, "LN3 not inhibited: {min_during}");
    let after = trace.index_range(25.0, 70.0);
    let max_after = trace.samples[after]
        .iter()
        .cloned()
        .fold(f64::MIN, f64::max);
    assert!(max_after > 10.0, "LN3 rebound missing: {max_after}");
    assert!(out.spikes_of(LN3).is_empty());
    assert!(out.spikes_of(LN4).is_empty());
}

#[test]
fn target_interval_drives_detection() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    let out = run_circuit(&net, double_pulse(&spec(20.0)).unwrap(), &[], DT);
    let second_pulse = (40.0, 65.0);
    assert!(
        count_spikes(out.spikes_of(LN3), second_pulse) >= 1,
        "LN3 must fire during the second pulse: {:?}",
        out.spikes_of(LN3)
    );
    assert!(!out.spikes_of(LN4).is_empty(), "LN4 must detect the target");
}

#[test]
fn off_target_intervals_stay_silent() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    for ipi in [0.0, 10.0, 30.0, 40.0, 50.0] {
        let out = run_circuit(&net, double_pulse(&spec(ipi)).unwrap(), &[], DT);
        assert!(
            out.spikes_of(LN4).is_empty(),
            "false positive at interval {ipi}"
        );
    }
}

#[test]
fn removing_the_delay_element_kills_detection() {
    let presets = presets::cricket::<f64>();
    let mut net = build_cricket_circuit(&presets).unwrap();
    net.synapses
        .retain(|s| !(s.pre == PreId::Neuron(LN2) && s.post == LN3));
    for ipi in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        let out = run_circuit(&net, double_pulse(&spec(ipi)).unwrap(), &[], DT);
        assert!(
            out.spikes_of(LN4).is_empty(),
            "LN4 fired at interval {ipi} without the delay element"
        );
    }
}

#[test]
fn interspike_intervals_respect_refractory_period() {
    let presets = presets::cricket::<f64>();
    let net = build_cricket_circuit(&presets).unwrap();
    let out = run_circuit(&net, double_pulse(&spec(20.0)).unwrap(), &[], DT);
    let refr = [
        presets.ln2_neuron.refractory,
        presets.ln3_neuron.refractory,
        presets.ln4_neuron.refractory,
    ];
    for (id, min_gap) in [LN2, LN3, LN4].into_iter().zip(refr) {
        let spikes = out.spikes_of(id);
        for pair in spikes.windows(2) {
            assert!(
                pair[1] - pair[0] >= min_gap - 1e-9,
                "neuron {} interspike interval below refractory",
                id.0
            );
        }
    }
}

#[test]
fn identical_runs_are_bit_identical() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    let a = run_circuit(&net, double_pulse(&spec(20.0)).unwrap(), &[LN3], DT);
    let b = run_circuit(&net, double_pulse(&spec(20.0)).unwrap(), &[LN3], DT);
    assert_eq!(a, b);
}

#[test]
fn detector_counts_stable_under_halved_step() {
    let net = build_cricket_circuit(&presets::cricket::<f64>()).unwrap();
    for ipi in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        let coarse = run_circuit(&net, double_pulse(&spec(ipi)).unwrap(), &[], 0.01);
        let fine = run_circuit(&net, double_pulse(&spec(ipi)).unwrap(), &[], 0.005);
        assert_eq!(
            coarse.spikes_of(LN4).len(),
            fine.spikes_of(LN4).len(),
            "LN4 count changed with dt at interval {ipi}"
        );
    }
}

#[test]
fn spikes_reach_synapses_one_step_late() {
    // Two-neuron chain: the first neuron spikes under strong injection and
    // the second one's membrane departs from rest only after the one-step
    // delivery latency.
    let mut upstream = presets::cricket::<f64>().ln2_neuron;
    upstream.injection_current = 2000.0;
    let downstream = presets::cricket::<f64>().ln4_neuron;
    let net = Network {
        neurons: vec![(NeuronId(0), upstream), (NeuronId(1), downstream)],
        synapses: vec![Synapse {
            pre: PreId::Neuron(NeuronId(0)),
            post: NeuronId(1),
            params: presets::cricket::<f64>().ln3_ln4,
        }],
        sources: vec![],
    };
    let out = simulate(&net, &BTreeMap::new(), 30.0, DT, &[NeuronId(1)]).unwrap();
    let first_spike = out.spikes_of(NeuronId(0))[0];
    let trace = out.trace_of(NeuronId(1)).unwrap();
    let spike_step = (first_spike / DT).round() as usize;
    // Baseline for the downstream neuron shifts with its injection (zero
    // here), so the trace is exactly zero until the EPSP arrives.
    assert!(trace.samples[..=spike_step].iter().all(|&v| v == 0.0));
    assert!(trace.samples[spike_step + 2] > 0.0);
}

#[test]
fn polychronous_patterns_select_their_detector() {
    let p = presets::polychronous::<f64>();
    let delays = vec![vec![90.0, 75.0, 60.0], vec![60.0, 75.0, 90.0]];
    let net = build_polychronous(3, 2, &delays, &p, DT).unwrap();
    let pattern = [1.0, 16.0, 31.0];

    let run = |times: Option<[f64; 3]>| {
        let mut stimuli = BTreeMap::new();
        if let Some(times) = times {
            for (i, &t) in times.iter().enumerate() {
                stimuli.insert(SourceId(i as u32), SpikeTrain::new(vec![t]).unwrap());
            }
        }
        simulate(&net, &stimuli, 250.0, DT, &[]).unwrap()
    };

    let matched = run(Some(pattern));
    assert!(!matched.spikes_of(NeuronId(0)).is_empty());
    assert!(matched.spikes_of(NeuronId(1)).is_empty());

    let swapped = run(Some([pattern[2], pattern[1], pattern[0]]));
    assert!(swapped.spikes_of(NeuronId(0)).is_empty());
    assert!(!swapped.spikes_of(NeuronId(1)).is_empty());

    let silent = run(None);
    assert!(silent.spikes_of(NeuronId(0)).is_empty());
    assert!(silent.spikes_of(NeuronId(1)).is_empty());
}

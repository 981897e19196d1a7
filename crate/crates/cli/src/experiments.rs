//! Experiment drivers: population characterization, interval and noise
//! sweeps, the classification-boundary sweep, the saturated-mode
//! configuration sweep, and the polychronous detection demo.
//!
//! Every trial draws its stimulus seed from the master seed and the trial
//! coordinates, so reports are pure functions of (config, seed). Trials
//! start from a fresh network state, which stands in for the long
//! inter-trial relaxation of the measurement protocol (all model state
//! decays well before a half-second gap).

use std::collections::BTreeMap;

use rebound_core::delay::sweep_weights;
use rebound_core::metrics::{classify, count_spikes, IpiCounts, Verdict};
use rebound_core::mismatch::{population_characterize, sample_population};
use rebound_core::netsim::{
    build_cricket_circuit, build_polychronous, simulate, NeuronId, SourceId, AN1, LN2, LN3, LN4,
};
use rebound_core::rng::SplitMix64;
use rebound_core::stimgen::double_pulse;
use rebound_core::{CricketPresets, PulseSpec, SimResult, SpikeTrain};

use crate::config::ExperimentConfig;
use crate::report::{Report, Table};

/// Stable tags separating the seed streams of the experiments.
mod seed_tag {
    pub const IPI_SWEEP: u64 = 1;
    pub const BOUNDARY: u64 = 2;
    pub const DETECT: u64 = 3;
}

fn trial_seed(master: u64, tag: u64, keys: &[u64]) -> u64 {
    let mut all = vec![tag];
    all.extend_from_slice(keys);
    SplitMix64::from_keys(master, &all).next_u64()
}

/// Simulate one double-pulse trial of a circuit. Returns the result and
/// the stimulus end time.
fn run_trial(
    circuit: &CricketPresets,
    cfg: &ExperimentConfig,
    ipi: f64,
    noise: f64,
    seed: u64,
    record: &[NeuronId],
) -> anyhow::Result<(SimResult, f64)> {
    let spec = PulseSpec {
        pulse_dur: cfg.stimulus.pulse_dur,
        n_spikes: cfg.stimulus.n_spikes,
        ipi,
        noise_frac: noise,
        seed,
    };
    let stim = double_pulse(&spec)?;
    let stim_end = stim.last().unwrap_or(0.0);
    let duration = stim_end + cfg.stimulus.tail;
    let net = build_cricket_circuit(circuit)?;
    let mut stimuli = BTreeMap::new();
    stimuli.insert(AN1, stim);
    let result = simulate(&net, &stimuli, duration, cfg.dt, record)?;
    Ok((result, stim_end))
}

/// Spikes of the inhibitory neuron attributed to each pulse. For a merged
/// (zero-interval) stimulus the two windows cannot be separated, so the
/// total is split against a doubled single-pulse expectation by the caller.
pub fn ln2_pulse_counts(result: &SimResult, cfg: &ExperimentConfig, ipi: f64) -> (usize, usize) {
    let ln2 = result.spikes_of(LN2);
    let margin = 2.5_f64.min(ipi.max(0.0) / 2.0 + 1.25);
    let p1_end = cfg.stimulus.pulse_dur + margin;
    let p2_start = cfg.stimulus.pulse_dur + ipi;
    let p2_end = p2_start + cfg.stimulus.pulse_dur + 2.5;
    (
        count_spikes(ln2, (0.0, p1_end)),
        count_spikes(ln2, (p2_start.max(p1_end), p2_end)),
    )
}

/// Population characterization: sample mismatched instances, measure each
/// one's delay metrics, and histogram the five characterization
/// quantities.
pub fn run_characterization(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let presets = cfg.effective_presets();
    let nominal = &presets.delay_characterization;
    let population = sample_population(
        &nominal.neuron,
        &nominal.element,
        cfg.characterization.instances,
        &cfg.mismatch,
    )?;
    let mut stim_element = nominal.element;
    stim_element.n_stim_spikes = cfg.characterization.stim_spikes;
    stim_element.stim_window = cfg.characterization.stim_window;
    let stim = stim_element.stimulus()?;
    let out = population_characterize(
        &population,
        &stim,
        cfg.characterization.pre_roll,
        cfg.characterization.duration,
        cfg.dt,
    )?;

    let mut report = Report::new("characterize", cfg);
    let prov = report.provenance();

    let mut instances = Table::new(
        "instances",
        &[
            "instance_id",
            "v_min",
            "v_max",
            "tau_inh",
            "tau_exc",
            "tau_delay",
            "valid_mask",
        ],
        prov,
    );
    for im in &out.instances {
        let m = &im.metrics;
        instances.push_row(vec![
            im.instance.into(),
            m.v_min.into(),
            m.v_max.into(),
            m.tau_inh.into(),
            m.tau_exc.into(),
            m.tau_delay.into(),
            (m.valid_mask() as i64).into(),
        ]);
    }
    report.tables.push(instances);

    for (name, hist) in &out.histograms {
        let mut t = Table::new(
            &format!("histogram_{name}"),
            &["bin_left", "bin_right", "count"],
            prov,
        );
        for (left, right, count) in hist.bins() {
            t.push_row(vec![left.into(), right.into(), (count as i64).into()]);
        }
        report.tables.push(t);
    }

    let mut summary = Table::new(
        "summary",
        &[
            "metric",
            "n_valid",
            "n_invalid",
            "min",
            "max",
            "mode_bin_left",
            "mode_bin_right",
        ],
        prov,
    );
    for (name, s) in &out.summaries {
        summary.push_row(vec![
            name.as_str().into(),
            s.n_valid.into(),
            s.n_invalid.into(),
            s.min.into(),
            s.max.into(),
            s.mode_bin_left.into(),
            s.mode_bin_right.into(),
        ]);
    }
    report.tables.push(summary);
    Ok(report)
}

/// Interval sweep: for every noise level and interval, run seeded
/// double-pulse trials and tabulate spike counts and verdicts.
pub fn run_ipi_sweep(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let presets = cfg.effective_presets();
    run_ipi_sweep_with(cfg, &presets.cricket.circuit, "ipi_sweep")
}

/// Interval sweep for an explicit circuit preset (used for the boundary
/// variant and by tests).
pub fn run_ipi_sweep_with(
    cfg: &ExperimentConfig,
    circuit: &CricketPresets,
    experiment: &str,
) -> anyhow::Result<Report> {
    let mut report = Report::new(experiment, cfg);
    let prov = report.provenance();

    let mut trials_table = Table::new(
        "trials",
        &[
            "noise",
            "trial",
            "ipi",
            "stim_seed",
            "ln2_pulse1",
            "ln2_pulse2",
            "ln3",
            "ln4",
        ],
        prov,
    );
    let mut counts_table = Table::new(
        "counts",
        &[
            "noise",
            "ipi",
            "ln3_mean",
            "ln3_std",
            "ln4_mean",
            "ln4_std",
            "ln4_response_rate",
        ],
        prov,
    );
    let mut verdict_table = Table::new(
        "verdicts",
        &[
            "noise",
            "n_correct",
            "n_false_positive",
            "n_false_negative",
            "n_both_errors",
        ],
        prov,
    );

    for (noise_idx, &noise) in cfg.noise_levels.iter().enumerate() {
        let mut ln3_counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut ln4_counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut verdicts = [0usize; 4];
        for trial in 0..cfg.trials {
            let mut per_ipi = Vec::new();
            for (ipi_idx, &ipi) in cfg.ipi_set.iter().enumerate() {
                let seed = trial_seed(
                    cfg.seed,
                    seed_tag::IPI_SWEEP,
                    &[noise_idx as u64, trial as u64, ipi_idx as u64],
                );
                let (result, _) = run_trial(circuit, cfg, ipi, noise, seed, &[])?;
                let ln3 = result.spikes_of(LN3).len();
                let ln4 = result.spikes_of(LN4).len();
                let (p1, p2) = ln2_pulse_counts(&result, cfg, ipi);
                trials_table.push_row(vec![
                    noise.into(),
                    trial.into(),
                    ipi.into(),
                    (seed as i64).into(),
                    p1.into(),
                    p2.into(),
                    ln3.into(),
                    ln4.into(),
                ]);
                ln3_counts.entry(ipi_idx).or_default().push(ln3);
                ln4_counts.entry(ipi_idx).or_default().push(ln4);
                per_ipi.push(IpiCounts {
                    ipi,
                    ln3_spikes: ln3,
                    ln4_spikes: ln4,
                });
            }
            let outcome = classify(per_ipi, cfg.target_ipi);
            let slot = match outcome.verdict() {
                Verdict::Correct => 0,
                Verdict::FalsePositive => 1,
                Verdict::FalseNegative => 2,
                Verdict::BothErrors => 3,
            };
            verdicts[slot] += 1;
        }
        for (ipi_idx, &ipi) in cfg.ipi_set.iter().enumerate() {
            let ln3 = &ln3_counts[&ipi_idx];
            let ln4 = &ln4_counts[&ipi_idx];
            let response_rate = ln4.iter().filter(|&&c| c >= 1).count() as f64 / ln4.len() as f64;
            counts_table.push_row(vec![
                noise.into(),
                ipi.into(),
                mean(ln3).into(),
                std_dev(ln3).into(),
                mean(ln4).into(),
                std_dev(ln4).into(),
                response_rate.into(),
            ]);
        }
        verdict_table.push_row(vec![
            noise.into(),
            verdicts[0].into(),
            verdicts[1].into(),
            verdicts[2].into(),
            verdicts[3].into(),
        ]);
    }
    report.tables.push(trials_table);
    report.tables.push(counts_table);
    report.tables.push(verdict_table);
    Ok(report)
}

fn mean(v: &[usize]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<usize>() as f64 / v.len() as f64
}

fn std_dev(v: &[usize]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let var = v.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    var.sqrt()
}

/// Boundary sweep: classify every (direct weight, relay weight) grid point
/// at each configured noise level. A point passes when every trial over
/// the full interval set is verdict-correct.
pub fn run_boundary_sweep(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let presets = cfg.effective_presets();
    let base = &presets.cricket.circuit;
    let w13s = &cfg.boundary.an1_ln3_weights;
    let w34s = &cfg.boundary.ln3_ln4_weights;

    let mut report = Report::new("boundary", cfg);
    let prov = report.provenance();
    let mut grid_table = Table::new(
        "grid",
        &[
            "noise",
            "an1_ln3_weight",
            "ln3_ln4_weight",
            "passes",
            "n_correct",
            "n_trials",
        ],
        prov,
    );
    let mut region_table = Table::new("passing_region", &["noise", "n_passing", "n_points"], prov);
    let mut boundary_table = Table::new(
        "boundary_points",
        &["noise", "an1_ln3_weight", "ln3_ln4_weight"],
        prov,
    );

    for (noise_idx, &noise) in cfg.boundary.noise_levels.iter().enumerate() {
        let mut passing = vec![vec![false; w34s.len()]; w13s.len()];
        for (i, &w13) in w13s.iter().enumerate() {
            for (j, &w34) in w34s.iter().enumerate() {
                let mut circuit = base.clone();
                circuit.an1_ln3.weight = w13;
                circuit.ln3_ln4.weight = w34;
                let mut n_correct = 0usize;
                for trial in 0..cfg.trials {
                    let mut per_ipi = Vec::new();
                    for (ipi_idx, &ipi) in cfg.ipi_set.iter().enumerate() {
                        let seed = trial_seed(
                            cfg.seed,
                            seed_tag::BOUNDARY,
                            &[noise_idx as u64, trial as u64, ipi_idx as u64],
                        );
                        let (result, _) = run_trial(&circuit, cfg, ipi, noise, seed, &[])?;
                        per_ipi.push(IpiCounts {
                            ipi,
                            ln3_spikes: result.spikes_of(LN3).len(),
                            ln4_spikes: result.spikes_of(LN4).len(),
                        });
                    }
                    if classify(per_ipi, cfg.target_ipi).is_correct() {
                        n_correct += 1;
                    }
                }
                let passes = n_correct == cfg.trials;
                passing[i][j] = passes;
                grid_table.push_row(vec![
                    noise.into(),
                    w13.into(),
                    w34.into(),
                    passes.into(),
                    n_correct.into(),
                    cfg.trials.into(),
                ]);
            }
        }
        let n_passing = passing.iter().flatten().filter(|&&p| p).count();
        region_table.push_row(vec![
            noise.into(),
            n_passing.into(),
            (w13s.len() * w34s.len()).into(),
        ]);
        // Boundary: passing points with at least one failing 4-neighbor.
        for (i, row) in passing.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                if !p {
                    continue;
                }
                let neighbors = [
                    i.checked_sub(1).map(|a| (a, j)),
                    (i + 1 < w13s.len()).then_some((i + 1, j)),
                    j.checked_sub(1).map(|b| (i, b)),
                    (j + 1 < w34s.len()).then_some((i, j + 1)),
                ];
                let on_edge = neighbors.into_iter().flatten().any(|(a, b)| !passing[a][b]);
                if on_edge {
                    boundary_table.push_row(vec![noise.into(), w13s[i].into(), w34s[j].into()]);
                }
            }
        }
    }
    report.tables.push(grid_table);
    report.tables.push(region_table);
    report.tables.push(boundary_table);
    Ok(report)
}

/// Saturated-mode configuration sweep over the shipped weight grid.
pub fn run_delay_config_sweep(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let presets = cfg.effective_presets();
    let preset = &presets.delay_config;
    let points = sweep_weights(
        &preset.element,
        &preset.neuron,
        &cfg.delay_sweep.w_inh,
        &cfg.delay_sweep.w_exc,
        cfg.delay_sweep.duration,
        cfg.dt,
    )?;
    let mut report = Report::new("delay_sweep", cfg);
    let prov = report.provenance();
    let mut table = Table::new(
        "sweep",
        &[
            "w_inh",
            "w_exc",
            "tau_inh",
            "v_max",
            "tau_delay",
            "v_min",
            "valid_mask",
        ],
        prov,
    );
    for p in &points {
        table.push_row(vec![
            p.w_inh.into(),
            p.w_exc.into(),
            p.metrics.tau_inh.into(),
            p.metrics.v_max.into(),
            p.metrics.tau_delay.into(),
            p.metrics.v_min.into(),
            (p.metrics.valid_mask() as i64).into(),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

/// Polychronous demo: configure the delay matrix, then present the matched
/// pattern, its reversal, and silence.
pub fn run_polychronous_demo(cfg: &ExperimentConfig) -> anyhow::Result<Report> {
    let presets = cfg.effective_presets();
    let poly = &presets.polychronous.presets;
    let delays = &cfg.polychronous.delays;
    let detectors = delays.len();
    let sources = delays.first().map(Vec::len).unwrap_or(0);
    anyhow::ensure!(
        sources == cfg.polychronous.pattern.len(),
        "pattern length must match the number of sources"
    );
    let net = build_polychronous(sources, detectors, delays, poly, cfg.dt)?;

    let mut report = Report::new("polychronous", cfg);
    let prov = report.provenance();

    let mut edges = Table::new(
        "edges",
        &["source", "detector", "target_delay", "w_inh", "w_exc"],
        prov,
    );
    // Synapses are pushed pairwise (inh, exc) per (detector, source).
    for (k, pair) in net.synapses.chunks(2).enumerate() {
        let j = k / sources;
        let i = k % sources;
        edges.push_row(vec![
            i.into(),
            j.into(),
            delays[j][i].into(),
            pair[0].params.weight.into(),
            pair[1].params.weight.into(),
        ]);
    }
    report.tables.push(edges);

    let mut patterns = Table::new(
        "patterns",
        &["pattern", "detector", "spike_count", "spike_times"],
        prov,
    );
    // The swapped case assigns the pattern times to the sources in reverse
    // order, which aligns the arrivals at the second detector instead.
    let cases: [(&str, Option<Vec<f64>>); 3] = [
        ("matched", Some(cfg.polychronous.pattern.clone())),
        (
            "swapped",
            Some(cfg.polychronous.pattern.iter().rev().cloned().collect()),
        ),
        ("silent", None),
    ];
    for (label, times) in cases {
        let mut stimuli = BTreeMap::new();
        if let Some(times) = times {
            for (i, &t) in times.iter().enumerate() {
                stimuli.insert(SourceId(i as u32), SpikeTrain::new(vec![t])?);
            }
        }
        let result = simulate(&net, &stimuli, cfg.polychronous.duration, cfg.dt, &[])?;
        for j in 0..detectors {
            let spikes = result.spikes_of(NeuronId(j as u32));
            let times_text = spikes
                .iter()
                .map(|t| format!("{t}"))
                .collect::<Vec<_>>()
                .join(";");
            patterns.push_row(vec![
                label.into(),
                j.into(),
                spikes.len().into(),
                times_text.into(),
            ]);
        }
    }
    report.tables.push(patterns);
    Ok(report)
}

/// Single detection run with full trace dump.
pub fn run_detect(cfg: &ExperimentConfig, ipi: f64, noise: f64) -> anyhow::Result<Report> {
    let presets = cfg.effective_presets();
    let circuit = &presets.cricket.circuit;
    let seed = trial_seed(cfg.seed, seed_tag::DETECT, &[0]);
    let record = [LN2, LN3, LN4];
    let (result, _) = run_trial(circuit, cfg, ipi, noise, seed, &record)?;

    let mut report = Report::new("detect", cfg);
    let prov = report.provenance();

    let mut spikes = Table::new("spikes", &["neuron", "time"], prov);
    for (id, times) in &result.spikes {
        for &t in times {
            spikes.push_row(vec![(*id as usize).into(), t.into()]);
        }
    }
    report.tables.push(spikes);

    let mut traces = Table::new("traces", &["time", "v_ln2", "v_ln3", "v_ln4"], prov);
    let ln2 = result.trace_of(LN2).expect("ln2 recorded");
    let ln3 = result.trace_of(LN3).expect("ln3 recorded");
    let ln4 = result.trace_of(LN4).expect("ln4 recorded");
    for k in 0..ln2.len() {
        traces.push_row(vec![
            ln2.time_at(k).into(),
            ln2.samples[k].into(),
            ln3.samples[k].into(),
            ln4.samples[k].into(),
        ]);
    }
    report.tables.push(traces);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 2;
        cfg.noise_levels = vec![0.0];
        cfg.characterization.instances = 4;
        cfg.boundary.an1_ln3_weights = vec![1100.0];
        cfg.boundary.ln3_ln4_weights = vec![11000.0];
        cfg.boundary.noise_levels = vec![0.0];
        cfg
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = small_cfg();
        let a = run_ipi_sweep(&cfg).unwrap();
        let b = run_ipi_sweep(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn characterization_report_shape() {
        let cfg = small_cfg();
        let report = run_characterization(&cfg).unwrap();
        let instances = report.table("instances").unwrap();
        assert_eq!(instances.rows.len(), 4);
        assert!(report.table("histogram_v_max").is_some());
        assert!(report.table("summary").is_some());
    }

    #[test]
    fn detect_dumps_traces() {
        let cfg = small_cfg();
        let report = run_detect(&cfg, 20.0, 0.0).unwrap();
        let traces = report.table("traces").unwrap();
        assert!(traces.rows.len() > 1000);
        let spikes = report.table("spikes").unwrap();
        assert!(!spikes.rows.is_empty());
    }
}

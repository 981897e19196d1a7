//! Characterization quantities extracted from membrane traces and spike
//! lists: excursion extrema, widths at half level, delay time, and detector
//! classification verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::scalar::{lit, Scalar};
use crate::trace::Trace;

/// Excursions smaller than this (mV) are treated as noise, mirroring the
/// resolution limit of the 8-bit scope the measurement protocol assumes.
const SIGNIFICANCE_FLOOR_MV: f64 = 1.0;

/// Delay-element characterization metrics from one baseline-relative trace.
///
/// `tau_inh` is the full width of the interval where the trace sits at or
/// below half the minimum; `tau_exc` the width at or above half the maximum
/// (the maximum is searched after the minimum); `tau_delay` runs from the
/// onset of the half-minimum interval to the onset of the half-maximum
/// interval. Each metric carries a validity flag; a flag is false when the
/// corresponding excursion is below a 1 mV significance floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayMetrics<S: Scalar> {
    pub v_min: S,
    pub v_max: S,
    pub tau_inh: S,
    pub tau_exc: S,
    pub tau_delay: S,
    pub valid_v_min: bool,
    pub valid_v_max: bool,
    pub valid_tau_inh: bool,
    pub valid_tau_exc: bool,
    pub valid_tau_delay: bool,
}

impl<S: Scalar> DelayMetrics<S> {
    pub fn all_valid(&self) -> bool {
        self.valid_v_min
            && self.valid_v_max
            && self.valid_tau_inh
            && self.valid_tau_exc
            && self.valid_tau_delay
    }

    /// Bitmask for CSV export: bit 0 = v_min .. bit 4 = tau_delay.
    pub fn valid_mask(&self) -> u8 {
        u8::from(self.valid_v_min)
            | u8::from(self.valid_v_max) << 1
            | u8::from(self.valid_tau_inh) << 2
            | u8::from(self.valid_tau_exc) << 3
            | u8::from(self.valid_tau_delay) << 4
    }

    /// Alternate delay reading: onset of inhibition to the *offset* of
    /// excitation. Kept for comparison with the onset-to-onset definition
    /// used by `tau_delay`.
    pub fn tau_delay_to_offset(&self) -> S {
        self.tau_delay + self.tau_exc
    }

    fn invalid() -> Self {
        Self {
            v_min: S::zero(),
            v_max: S::zero(),
            tau_inh: S::zero(),
            tau_exc: S::zero(),
            tau_delay: S::zero(),
            valid_v_min: false,
            valid_v_max: false,
            valid_tau_inh: false,
            valid_tau_exc: false,
            valid_tau_delay: false,
        }
    }
}

/// Subtract the mean of the samples in `[t0, t0 + pre_window)` so the
/// pre-stimulus baseline sits at zero.
pub fn baseline_subtract<S: Scalar>(trace: &Trace<S>, pre_window: S) -> Result<Trace<S>> {
    let range = trace.index_range(trace.t0, trace.t0 + pre_window);
    if range.is_empty() {
        return Err(SimError::EmptyWindow(
            "baseline pre-window holds no samples".to_string(),
        ));
    }
    let n = S::from_usize(range.len()).unwrap();
    let mean = trace.samples[range].iter().fold(S::zero(), |a, &b| a + b) / n;
    Ok(trace.map(|v| v - mean))
}

/// Linearly interpolated time at which the trace crosses `level` between
/// samples `i` and `i + 1`.
fn cross_time<S: Scalar>(trace: &Trace<S>, i: usize, level: S) -> S {
    let a = trace.samples[i];
    let b = trace.samples[i + 1];
    if a == b {
        return trace.time_at(i);
    }
    trace.time_at(i) + trace.dt * (level - a) / (b - a)
}

/// Contiguous interval around `center` where `pred(sample)` holds, with
/// endpoints interpolated at the boundary crossings. Returns (onset,
/// offset) times.
fn half_interval<S: Scalar>(trace: &Trace<S>, center: usize, level: S, below: bool) -> (S, S) {
    let inside = |v: S| if below { v <= level } else { v >= level };

    let mut left = center;
    while left > 0 && inside(trace.samples[left - 1]) {
        left -= 1;
    }
    let onset = if left == 0 {
        trace.time_at(0)
    } else {
        cross_time(trace, left - 1, level)
    };

    let mut right = center;
    while right + 1 < trace.len() && inside(trace.samples[right + 1]) {
        right += 1;
    }
    let offset = if right + 1 >= trace.len() {
        trace.time_at(trace.len() - 1)
    } else {
        cross_time(trace, right, level)
    };

    (onset, offset)
}

/// Extract the delay metrics from a baseline-subtracted trace.
///
/// Half levels are measured against the zero baseline. Metrics whose
/// excursion falls under the significance floor are flagged invalid rather
/// than reported as an error, matching how a near-absent excitation shows
/// up in a mismatched population.
pub fn extract_metrics<S: Scalar>(trace: &Trace<S>) -> DelayMetrics<S> {
    let floor = lit::<S>(SIGNIFICANCE_FLOOR_MV);
    let Some((i_min, v_min)) = trace.argmin() else {
        return DelayMetrics::invalid();
    };
    let valid_v_min = v_min <= -floor;

    let (i_max, v_max) = match trace.argmax_from(i_min) {
        Some(m) => m,
        None => (i_min, v_min),
    };
    let valid_v_max = v_max >= floor;

    let two = lit::<S>(2.0);
    let mut m = DelayMetrics::invalid();
    m.v_min = v_min;
    m.v_max = v_max;
    m.valid_v_min = valid_v_min;
    m.valid_v_max = valid_v_max;

    let mut inh_onset = None;
    if valid_v_min {
        let (onset, offset) = half_interval(trace, i_min, v_min / two, true);
        m.tau_inh = offset - onset;
        m.valid_tau_inh = true;
        inh_onset = Some(onset);
    }
    if valid_v_max {
        let (onset, offset) = half_interval(trace, i_max, v_max / two, false);
        m.tau_exc = offset - onset;
        m.valid_tau_exc = true;
        if let Some(inh_on) = inh_onset {
            m.tau_delay = onset - inh_on;
            m.valid_tau_delay = true;
        }
    }
    m
}

/// Number of spikes inside the half-open window `[from, to)`.
pub fn count_spikes<S: Scalar>(spikes: &[S], window: (S, S)) -> usize {
    spikes
        .iter()
        .filter(|&&t| t >= window.0 && t < window.1)
        .count()
}

/// Detector verdict for one pass over the interpulse-interval set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Correct,
    FalsePositive,
    FalseNegative,
    /// Both a miss at the target interval and a spurious response
    /// elsewhere in the same trial.
    BothErrors,
}

/// Spike counts for one interpulse interval within a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpiCounts<S: Scalar> {
    pub ipi: S,
    pub ln3_spikes: usize,
    pub ln4_spikes: usize,
}

/// Classification outcome of one trial over the full interval set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOutcome<S: Scalar> {
    pub per_ipi: Vec<IpiCounts<S>>,
    pub target_ipi: S,
    pub false_positive: bool,
    pub false_negative: bool,
}

impl<S: Scalar> ClassificationOutcome<S> {
    pub fn verdict(&self) -> Verdict {
        match (self.false_positive, self.false_negative) {
            (false, false) => Verdict::Correct,
            (true, false) => Verdict::FalsePositive,
            (false, true) => Verdict::FalseNegative,
            (true, true) => Verdict::BothErrors,
        }
    }

    pub fn is_correct(&self) -> bool {
        !self.false_positive && !self.false_negative
    }
}

/// Classify one trial: correct means the detector fired at the target
/// interval and stayed silent at every other interval in the set.
pub fn classify<S: Scalar>(per_ipi: Vec<IpiCounts<S>>, target_ipi: S) -> ClassificationOutcome<S> {
    let mut false_positive = false;
    let mut false_negative = false;
    let mut saw_target = false;
    for c in &per_ipi {
        if c.ipi == target_ipi {
            saw_target = true;
            if c.ln4_spikes == 0 {
                false_negative = true;
            }
        } else if c.ln4_spikes >= 1 {
            false_positive = true;
        }
    }
    if !saw_target {
        false_negative = true;
    }
    ClassificationOutcome {
        per_ipi,
        target_ipi,
        false_positive,
        false_negative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_from(samples: Vec<f64>) -> Trace<f64> {
        Trace::new(0.0, 1.0, samples)
    }

    #[test]
    fn baseline_constant_trace_goes_to_zero() {
        let tr = trace_from(vec![3.25; 50]);
        let out = baseline_subtract(&tr, 10.0).unwrap();
        assert!(out.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn baseline_shifts_by_pre_window_mean() {
        let mut samples = vec![12.5; 20];
        samples.extend(vec![20.0; 20]);
        let out = baseline_subtract(&trace_from(samples), 20.0).unwrap();
        assert!((out.samples[0]).abs() < 1e-12);
        assert!((out.samples[30] - 7.5).abs() < 1e-12);
    }

    #[test]
    fn baseline_empty_window_is_error() {
        let tr = trace_from(vec![1.0; 10]);
        assert!(matches!(
            baseline_subtract(&tr, 0.0),
            Err(SimError::EmptyWindow(_))
        ));
    }

    #[test]
    fn flat_trace_has_no_valid_metrics() {
        let m = extract_metrics(&trace_from(vec![0.0; 100]));
        assert!(!m.valid_v_min && !m.valid_v_max);
        assert!(!m.valid_tau_inh && !m.valid_tau_exc && !m.valid_tau_delay);
        assert_eq!(m.valid_mask(), 0);
    }

    #[test]
    fn small_excursions_are_flagged_invalid() {
        let mut samples = vec![0.0; 100];
        samples[10] = -0.5;
        samples[50] = 0.5;
        let m = extract_metrics(&trace_from(samples));
        assert!(!m.valid_v_min && !m.valid_v_max);
    }

    #[test]
    fn count_spikes_half_open() {
        assert_eq!(count_spikes::<f64>(&[], (0.0, 10.0)), 0);
        assert_eq!(count_spikes(&[1.0, 2.0, 3.0], (0.0, 2.5)), 2);
        assert_eq!(count_spikes(&[1.0, 2.0, 3.0], (2.0, 3.0)), 1);
    }

    fn counts(ln4: [usize; 6]) -> Vec<IpiCounts<f64>> {
        let ipis = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0];
        ipis.iter()
            .zip(ln4)
            .map(|(&ipi, n)| IpiCounts {
                ipi,
                ln3_spikes: n,
                ln4_spikes: n,
            })
            .collect()
    }

    #[test]
    fn classify_verdicts() {
        assert_eq!(
            classify(counts([0, 0, 1, 0, 0, 0]), 20.0).verdict(),
            Verdict::Correct
        );
        assert_eq!(
            classify(counts([0, 1, 1, 0, 0, 0]), 20.0).verdict(),
            Verdict::FalsePositive
        );
        assert_eq!(
            classify(counts([0, 0, 0, 0, 0, 0]), 20.0).verdict(),
            Verdict::FalseNegative
        );
        assert_eq!(
            classify(counts([0, 1, 0, 0, 0, 0]), 20.0).verdict(),
            Verdict::BothErrors
        );
    }
}

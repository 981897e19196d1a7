//! Stimulus families: single pulses, double pulses with a variable
//! interpulse interval, and per-interval phase noise.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::rng::SplitMix64;
use crate::scalar::{lit, Scalar};

/// Shortest interval allowed between consecutive spikes after noise (ms).
const MIN_ISI_MS: f64 = 0.01;

/// An ordered list of spike times (ms), strictly increasing and
/// non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrain<S: Scalar> {
    times: Vec<S>,
}

impl<S: Scalar> SpikeTrain<S> {
    /// Build from a list of times, validating the ordering invariant.
    pub fn new(times: Vec<S>) -> Result<Self> {
        for pair in times.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(SimError::InvalidConfig(
                    "spike times must be strictly increasing".to_string(),
                ));
            }
        }
        if times.first().is_some_and(|&t| t < S::zero()) {
            return Err(SimError::InvalidConfig(
                "spike times must be non-negative".to_string(),
            ));
        }
        Ok(Self { times })
    }

    pub fn empty() -> Self {
        Self { times: Vec::new() }
    }

    pub fn times(&self) -> &[S] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<S> {
        self.times.last().copied()
    }

    /// Shift every spike later by `offset`.
    pub fn shifted(&self, offset: S) -> Self {
        Self {
            times: self.times.iter().map(|&t| t + offset).collect(),
        }
    }

    /// Concatenate two trains, deduplicating an exactly coincident boundary
    /// spike and clamping any residual overlap to the minimum interval.
    pub fn concat(&self, other: &Self) -> Self {
        let mut times = self.times.clone();
        let min_isi = lit::<S>(MIN_ISI_MS);
        for &t in &other.times {
            match times.last() {
                Some(&prev) if t == prev => {} // boundary spike, drop
                Some(&prev) if t < prev + min_isi => times.push(prev + min_isi),
                _ => times.push(t),
            }
        }
        Self { times }
    }

    /// CSV export: one spike time (ms) per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for t in &self.times {
            out.push_str(&format!("{t}\n"));
        }
        out
    }

    /// Parse the one-time-per-line CSV format. Blank lines and `#` comment
    /// lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let value: f64 = line.parse().map_err(|_| {
                SimError::InvalidConfig(format!(
                    "spike-train line {}: expected a number, got {line:?}",
                    lineno + 1
                ))
            })?;
            times.push(lit::<S>(value));
        }
        Self::new(times)
    }
}

/// Specification of one stimulus pulse (and, for double pulses, the gap).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec<S: Scalar> {
    /// Pulse duration (ms).
    pub pulse_dur: S,
    /// Number of spikes per pulse.
    pub n_spikes: usize,
    /// Interpulse interval for double pulses (ms).
    pub ipi: S,
    /// Phase-noise fraction: each interspike interval is perturbed by a
    /// uniform draw from `[-f * isi, +f * isi]`.
    pub noise_frac: S,
    pub seed: u64,
}

impl<S: Scalar> Default for PulseSpec<S> {
    fn default() -> Self {
        Self {
            pulse_dur: lit(20.0),
            n_spikes: 11,
            ipi: lit(20.0),
            noise_frac: S::zero(),
            seed: 0,
        }
    }
}

impl<S: Scalar> PulseSpec<S> {
    pub fn validate(&self) -> Result<()> {
        if self.n_spikes < 2 {
            return Err(SimError::InvalidConfig("n_spikes must be >= 2".to_string()));
        }
        if self.ipi < S::zero() {
            return Err(SimError::InvalidConfig("ipi must be >= 0".to_string()));
        }
        if self.noise_frac < S::zero() || self.noise_frac > S::one() {
            return Err(SimError::InvalidConfig(
                "noise_frac must be in [0, 1]".to_string(),
            ));
        }
        Ok(())
    }
}

/// Generate the intervals of one pulse, drawing noise from `rng`.
fn pulse_times<S: Scalar>(spec: &PulseSpec<S>, rng: &mut SplitMix64) -> Vec<S> {
    let isi_nom = spec.pulse_dur / S::from_usize(spec.n_spikes - 1).unwrap();
    let mut times = Vec::with_capacity(spec.n_spikes);
    let mut t = S::zero();
    times.push(t);
    for _ in 1..spec.n_spikes {
        let isi = if spec.noise_frac > S::zero() {
            let span = (spec.noise_frac * isi_nom).to_f64_lossy();
            let jitter = lit::<S>(rng.uniform(-span, span));
            (isi_nom + jitter).max(lit(MIN_ISI_MS))
        } else {
            isi_nom
        };
        t += isi;
        times.push(t);
    }
    times
}

/// A single pulse: `n_spikes` spikes with nominal interval
/// `pulse_dur / (n_spikes - 1)`, each interval independently perturbed when
/// the noise fraction is positive. Placement is cumulative, so jitter in one
/// interval shifts the spikes after it.
pub fn pulse<S: Scalar>(spec: &PulseSpec<S>) -> Result<SpikeTrain<S>> {
    spec.validate()?;
    let mut rng = SplitMix64::from_keys(spec.seed, &[1]);
    SpikeTrain::new(pulse_times(spec, &mut rng))
}

/// Two pulses; the second starts `pulse_dur + ipi` after the first. An
/// interpulse interval of zero merges the pulses into one continuous train
/// with the boundary spike deduplicated. Both pulses draw noise from the
/// same seeded stream.
pub fn double_pulse<S: Scalar>(spec: &PulseSpec<S>) -> Result<SpikeTrain<S>> {
    spec.validate()?;
    let mut rng = SplitMix64::from_keys(spec.seed, &[1]);
    let first = SpikeTrain::new(pulse_times(spec, &mut rng))?;
    let second = SpikeTrain::new(pulse_times(spec, &mut rng))?;
    let offset = spec.pulse_dur + spec.ipi;
    Ok(first.concat(&second.shifted(offset)))
}

/// The delay-element configuration stimulus: `n` spikes uniformly spanning
/// `[0, window]`.
pub fn delay_stim<S: Scalar>(n: usize, window: S) -> Result<SpikeTrain<S>> {
    if n == 0 {
        return Err(SimError::InvalidConfig(
            "delay stimulus needs at least one spike".to_string(),
        ));
    }
    if n == 1 {
        return SpikeTrain::new(vec![S::zero()]);
    }
    let step = window / S::from_usize(n - 1).unwrap();
    SpikeTrain::new((0..n).map(|k| step * S::from_usize(k).unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> PulseSpec<f64> {
        PulseSpec::default()
    }

    #[test]
    fn noiseless_pulse_is_periodic() {
        let train = pulse(&spec()).unwrap();
        let expected: Vec<f64> = (0..11).map(|k| k as f64 * 2.0).collect();
        assert_eq!(train.times(), expected.as_slice());
    }

    #[test]
    fn two_spike_pulse_hits_endpoints() {
        let mut s = spec();
        s.n_spikes = 2;
        let train = pulse(&s).unwrap();
        assert_eq!(train.times(), &[0.0, 20.0]);
    }

    #[test]
    fn noise_stays_within_fraction() {
        let mut s = spec();
        s.noise_frac = 0.2;
        for seed in 0..1000 {
            s.seed = seed;
            let train = pulse(&s).unwrap();
            for pair in train.times().windows(2) {
                let isi = pair[1] - pair[0];
                assert!((1.6..=2.4).contains(&isi), "isi {isi} seed {seed}");
            }
        }
    }

    #[test]
    fn same_seed_reproduces() {
        let mut s = spec();
        s.noise_frac = 0.5;
        s.seed = 99;
        assert_eq!(pulse(&s).unwrap(), pulse(&s).unwrap());
    }

    #[test]
    fn double_pulse_offsets_second() {
        let mut s = spec();
        s.ipi = 20.0;
        let train = double_pulse(&s).unwrap();
        assert_eq!(train.len(), 22);
        assert_eq!(train.times()[11], 40.0);
        assert_eq!(train.last(), Some(60.0));
    }

    #[test]
    fn zero_ipi_merges_with_dedup() {
        let mut s = spec();
        s.ipi = 0.0;
        let train = double_pulse(&s).unwrap();
        let expected: Vec<f64> = (0..21).map(|k| k as f64 * 2.0).collect();
        assert_eq!(train.times(), expected.as_slice());
    }

    #[test]
    fn fifty_ms_ipi_ends_at_ninety() {
        let mut s = spec();
        s.ipi = 50.0;
        let train = double_pulse(&s).unwrap();
        assert_eq!(train.last(), Some(90.0));
    }

    #[test]
    fn delay_stim_protocol() {
        let train = delay_stim::<f64>(4, 20.0).unwrap();
        let times = train.times();
        assert_eq!(times.len(), 4);
        assert_eq!(times[0], 0.0);
        assert!((times[1] - 20.0 / 3.0).abs() < 1e-12);
        assert!((times[2] - 40.0 / 3.0).abs() < 1e-12);
        assert_eq!(times[3], 20.0);

        assert_eq!(delay_stim::<f64>(1, 20.0).unwrap().times(), &[0.0]);
        assert_eq!(
            delay_stim::<f64>(5, 40.0).unwrap().times(),
            &[0.0, 10.0, 20.0, 30.0, 40.0]
        );
    }

    #[test]
    fn csv_roundtrip() {
        let train = pulse(&spec()).unwrap();
        let text = train.to_csv();
        assert!(text.starts_with("0\n2\n"));
        let back = SpikeTrain::<f64>::from_csv(&text).unwrap();
        assert_eq!(train, back);
        assert!(SpikeTrain::<f64>::from_csv("1.0\nfoo\n").is_err());
        assert_eq!(
            SpikeTrain::<f64>::from_csv("# header\n\n3.5\n")
                .unwrap()
                .times(),
            &[3.5]
        );
    }

    #[test]
    fn noisy_trains_strictly_increase() {
        let mut s = spec();
        s.noise_frac = 1.0;
        for seed in 0..200 {
            s.seed = seed;
            for ipi in [0.0, 10.0, 50.0] {
                s.ipi = ipi;
                let train = double_pulse(&s).unwrap();
                for pair in train.times().windows(2) {
                    assert!(pair[0] < pair[1]);
                }
            }
        }
    }
}

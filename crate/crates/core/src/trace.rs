//! Uniformly sampled time series (membrane potentials, currents).

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// A trace sampled at a fixed step starting at `t0`.
///
/// Sample `i` is the value at time `t0 + i * dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace<S: Scalar> {
    pub t0: S,
    pub dt: S,
    pub samples: Vec<S>,
}

impl<S: Scalar> Trace<S> {
    pub fn new(t0: S, dt: S, samples: Vec<S>) -> Self {
        Self { t0, dt, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time of sample `i`.
    pub fn time_at(&self, i: usize) -> S {
        self.t0 + self.dt * S::from_usize(i).unwrap()
    }

    /// Indices of samples with time in `[from, to)`.
    pub fn index_range(&self, from: S, to: S) -> std::ops::Range<usize> {
        let lo = ((from - self.t0) / self.dt).ceil().to_usize().unwrap_or(0);
        let hi = ((to - self.t0) / self.dt)
            .ceil()
            .to_usize()
            .unwrap_or(0)
            .min(self.samples.len());
        lo.min(self.samples.len())..hi
    }

    /// Global minimum as (index, value). Ties resolve to the first sample.
    pub fn argmin(&self) -> Option<(usize, S)> {
        let mut best: Option<(usize, S)> = None;
        for (i, &v) in self.samples.iter().enumerate() {
            match best {
                Some((_, b)) if v >= b => {}
                _ => best = Some((i, v)),
            }
        }
        best
    }

    /// Global maximum over samples `from..`, as (index, value).
    pub fn argmax_from(&self, from: usize) -> Option<(usize, S)> {
        let mut best: Option<(usize, S)> = None;
        for (i, &v) in self.samples.iter().enumerate().skip(from) {
            match best {
                Some((_, b)) if v <= b => {}
                _ => best = Some((i, v)),
            }
        }
        best
    }

    /// Pointwise map, keeping the time axis.
    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_range_half_open() {
        let tr = Trace::new(0.0, 0.5, vec![0.0; 10]);
        assert_eq!(tr.index_range(1.0, 2.0), 2..4);
        assert_eq!(tr.index_range(0.0, 100.0), 0..10);
    }

    #[test]
    fn argmin_first_occurrence() {
        let tr = Trace::new(0.0, 1.0, vec![3.0, -1.0, -1.0, 2.0]);
        assert_eq!(tr.argmin(), Some((1, -1.0)));
        assert_eq!(tr.argmax_from(1), Some((3, 2.0)));
    }
}

//! Small deterministic RNG used for stimulus jitter and mismatch sampling.
//!
//! Reproducibility across platforms and runs is a hard requirement, so the
//! generator is implemented here instead of pulling in an external crate
//! whose stream might change between versions. SplitMix64 passes BigCrush,
//! is trivially seedable, and supports the index-keyed substream derivation
//! that mismatch sampling needs: each (seed, instance, parameter) tuple maps
//! to its own stream, so adding parameters later does not shift existing
//! draws.

/// SplitMix64 pseudo-random generator (Steele, Lea & Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Derive an independent stream from a seed and a list of u64 keys.
    /// The keys are folded in with multiply-xor steps so that nearby
    /// (seed, key) tuples produce unrelated streams.
    pub fn from_keys(seed: u64, keys: &[u64]) -> Self {
        let mut s = seed;
        for &k in keys {
            s ^= k.wrapping_mul(0x9e37_79b9_7f4a_7c15);
            s = s.wrapping_mul(0xbf58_476d_1ce4_e5b9);
            s ^= s >> 31;
        }
        Self::new(s)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal draw via Box-Muller. Consumes two uniforms and
    /// discards the second normal so every call advances the stream by the
    /// same amount.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// FNV-1a hash of a string, used to key substreams by parameter name.
pub fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

//! Deterministic random number generation.
//!
//! The benchmarks in this crate must be bit-reproducible across runs and
//! platforms, so we use SplitMix64 (Steele, Lea & Flood 2014): a tiny,
//! well-mixed 64-bit generator with a closed-form jump. Stream splitting is
//! done by hashing `(seed, index)` through the same mixer, so a parallel
//! sweep over indices draws from independent streams regardless of the
//! iteration order.

/// SplitMix64 generator state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for draw `index` under a master `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        let mut root = Self::new(seed);
        let base = root.next_u64();
        Self::new(base ^ mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix(self.state)
    }

    /// Uniform double in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in (0, 1], used where a log is taken.
    pub fn next_f64_open(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u = self.next_f64_open();
        let v = self.next_f64();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

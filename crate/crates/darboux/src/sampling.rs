//! Deterministic sampling utilities.
//!
//! Verification commands must produce byte-identical reports for identical
//! inputs, so randomness comes from a tiny seeded generator owned by this
//! crate rather than an external RNG whose stream might change across
//! versions.

/// SplitMix64 pseudo-random generator.
///
/// Statistically solid for sampling test points, trivially reproducible,
/// and fully determined by its 64-bit seed.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer draw from `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        // Desk-scale sampling; modulo bias is irrelevant at these sizes.
        self.next_u64() % n
    }

    /// Either -1.0 or 1.0.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

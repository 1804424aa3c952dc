//! Deterministic pseudo-random numbers for the generators.
//!
//! This is splitmix64: a 64-bit Weyl sequence (increment
//! 0x9E3779B97F4A7C15) followed by a two-round multiply-xorshift mix.
//! The algorithm is fixed here, constants and all, so that a seed
//! produces the same space on every platform and in every future
//! version; library generators must not be swapped in.

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1), 53 mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in 0..bound.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        // Multiply-shift reduction; bias is < 2^-64 * bound, irrelevant here.
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

//! SplitMix64 streams.
//!
//! The generator is counter based: output `t` of the stream seeded with `s`
//! is `mix64(s + (t + 1) * GAMMA)`, so any draw can be addressed directly.
//! Matrices use this to produce entry `(i, j)` without materializing the
//! rows before it.

use crate::special::normal_from_bits;

/// Weyl increment of SplitMix64 (the 64-bit golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `index`-th (0-based) output of the stream seeded by `seed`.
#[inline]
pub fn splitmix_at(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Seed of the child stream number `index` of `master`.
///
/// Distinct indices give distinct child seeds: `index * GAMMA`, `mix64`,
/// the xor with `master` and the first SplitMix64 step are all bijections.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    Rng64::new(master ^ mix64(index.wrapping_mul(GOLDEN_GAMMA))).next_u64()
}

/// A single-owner SplitMix64 stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rng64 {
    state: u64,
}

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Child stream `index`, see [`derive_seed`].
    pub fn child(master: u64, index: u64) -> Self {
        Self::new(derive_seed(master, index))
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Standard normal draw by inverse CDF of `(x + 0.5) / 2^64`.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        normal_from_bits(self.next_u64())
    }

    /// Uniform integer in `[0, bound)` by rejection; `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }
}

//! Seeded random streams with bit-exact semantics.
//!
//! A stream is xoshiro256++ seeded through SplitMix64 from a 64-bit seed,
//! then advanced by `stream` calls to the 2^128-step jump function, so
//! streams derived from one seed never overlap in practice.
//!
//! * uniform: `(next_u64 >> 11) · 2^-53` in [0, 1)
//! * Gaussian: Box–Muller on `u1 = 1 − uniform` (in (0, 1]) and
//!   `u2 = uniform`, yielding `r·cos θ` first and caching `r·sin θ` for the
//!   next call.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Stream ids used by the problem generator and the experiments.
pub mod streams {
    pub const LEFT_FACTOR: u32 = 0;
    pub const RIGHT_FACTOR: u32 = 1;
    pub const RANDOM_B: u32 = 2;
    pub const RANDOM_X: u32 = 3;
    pub const BAD_INVERSE: u32 = 4;
}

const TWO_POW_NEG_53: f64 = 1.0 / 9_007_199_254_740_992.0;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    pub fn stream(seed: u64, stream: u32) -> Self {
        let mut inner = Xoshiro256PlusPlus::seed_from_u64(seed);
        for _ in 0..stream {
            inner.jump();
        }
        SeededRng { inner, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }
}

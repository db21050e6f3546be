use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Seeded source of uniform random bits, standing in for the switch's
/// hardware random number generator.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `n` independent uniform bits as an integer in `[0, 2^n)`, `1 <= n <= 64`.
    pub fn random_bits(&mut self, n: u32) -> Result<u64> {
        if n == 0 || n > 64 {
            return Err(invalid("n", "bit count must be in 1..=64"));
        }
        Ok(self.bits(n))
    }

    #[inline]
    pub(crate) fn bits(&mut self, n: u32) -> u64 {
        debug_assert!((1..=64).contains(&n));
        self.rng.next_u64() >> (64 - n)
    }

    /// Uniform integer in `[0, bound)`. Models an arbitrary-range generator,
    /// which the switch does not have; used by the exact-probability modes.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.rng.random_range(0..bound)
    }

    /// Uniform real in `(0, 1]`.
    #[inline]
    pub fn unit_open_closed(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::flow::FlowId;

/// SplitMix64 output function. Full avalanche on 64-bit inputs.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stream of 64-bit values derived from one seed.
pub(crate) fn seed_stream(seed: u64) -> impl Iterator<Item = u64> {
    let mut state = seed;
    core::iter::repeat_with(move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(state)
    })
}

/// `d` independent hash functions, one per register array, each mapping a
/// flow onto `[0, entries_per_way)`.
#[derive(Clone, Debug)]
pub struct HashFamily {
    seeds: Vec<u64>,
    entries_per_way: usize,
}

impl HashFamily {
    pub fn new(d: usize, entries_per_way: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "at least one way is required"));
        }
        if entries_per_way == 0 {
            return Err(invalid("entries_per_way", "must be at least 1"));
        }
        Ok(Self::with_seeds(
            seed_stream(seed).take(d).collect(),
            entries_per_way,
        ))
    }

    pub(crate) fn with_seeds(seeds: Vec<u64>, entries_per_way: usize) -> Self {
        debug_assert!(!seeds.is_empty() && entries_per_way > 0);
        HashFamily {
            seeds,
            entries_per_way,
        }
    }

    pub fn ways(&self) -> usize {
        self.seeds.len()
    }

    pub fn entries_per_way(&self) -> usize {
        self.entries_per_way
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    /// Slot of `key` in register array `way`.
    pub fn hash_way(&self, way: usize, key: FlowId) -> Result<usize> {
        if way >= self.seeds.len() {
            return Err(invalid("way", "index out of range"));
        }
        Ok(self.slot(way, key))
    }

    /// Unchecked variant for the hot path; `way` must be `< d`.
    #[inline]
    pub(crate) fn slot(&self, way: usize, key: FlowId) -> usize {
        let seed = self.seeds[way];
        let h = mix64(mix64(key.0 ^ seed).wrapping_add(seed.rotate_left(32)));
        (h % self.entries_per_way as u64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn deterministic() {
        let h = HashFamily::new(4, 1000, 7).unwrap();
        let k = FlowId(123_456);
        assert_eq!(h.hash_way(0, k).unwrap(), h.hash_way(0, k).unwrap());
        let h2 = HashFamily::new(4, 1000, 7).unwrap();
        for way in 0..4 {
            assert_eq!(h.hash_way(way, k), h2.hash_way(way, k));
        }
    }

    #[test]
    fn single_slot_table() {
        let h = HashFamily::new(3, 1, 99).unwrap();
        for key in 0..1000 {
            for way in 0..3 {
                assert_eq!(h.hash_way(way, FlowId(key)).unwrap(), 0);
            }
        }
    }

    #[test]
    fn way_out_of_range() {
        let h = HashFamily::new(2, 8, 0).unwrap();
        assert!(h.hash_way(2, FlowId(1)).is_err());
        assert!(HashFamily::new(0, 8, 0).is_err());
        assert!(HashFamily::new(1, 0, 0).is_err());
    }

    #[test]
    fn chi_square_uniformity() {
        const SLOTS: usize = 256;
        const KEYS: usize = 100_000;
        let h = HashFamily::new(2, SLOTS, 0xfeed).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for way in 0..2 {
            let mut bins = [0u64; SLOTS];
            for _ in 0..KEYS {
                let key = FlowId(rng.random::<u64>() >> 1);
                bins[h.hash_way(way, key).unwrap()] += 1;
            }
            let expected = KEYS as f64 / SLOTS as f64;
            let stat: f64 = bins
                .iter()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum();
            let p = 1.0 - ChiSquared::new((SLOTS - 1) as f64).unwrap().cdf(stat);
            assert!(p > 0.01, "way {way}: chi2={stat} p={p}");
        }
    }

    #[test]
    fn sequential_keys_spread() {
        // dense trace IDs must not collapse onto few slots
        let h = HashFamily::new(1, 64, 3).unwrap();
        let mut bins = [0u32; 64];
        for key in 0..6400 {
            bins[h.hash_way(0, FlowId(key)).unwrap()] += 1;
        }
        assert!(bins.iter().all(|&b| b > 50 && b < 150), "{bins:?}");
    }

    proptest::proptest! {
        #[test]
        fn index_in_range(key in 0u64..u64::MAX, width in 1usize..5000, seed: u64, way in 0usize..4) {
            let h = HashFamily::new(4, width, seed).unwrap();
            proptest::prop_assert!(h.hash_way(way, FlowId(key)).unwrap() < width);
        }
    }
}

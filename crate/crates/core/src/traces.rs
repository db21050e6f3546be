//! Zipf trace synthesis and exact ground-truth statistics.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{invalid, Result};
use crate::flow::{FlowId, Packet};
use crate::random::RandomSource;

/// A packet trace: flow ids in arrival order. `seq` is the index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    flows: Vec<FlowId>,
}

impl Trace {
    pub fn new(flows: Vec<FlowId>) -> Result<Self> {
        if flows.iter().any(|f| f.is_empty()) {
            return Err(invalid(
                "trace",
                "the EMPTY sentinel cannot appear as a flow",
            ));
        }
        Ok(Trace { flows })
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn flows(&self) -> &[FlowId] {
        &self.flows
    }

    pub fn packets(&self) -> impl ExactSizeIterator<Item = Packet> + '_ {
        self.flows
            .iter()
            .enumerate()
            .map(|(i, &f)| Packet::new(f, i as u64))
    }

    /// Trace of `n` packets from `n` distinct flows. Every packet is
    /// unmatched on arrival, which maximises recirculation.
    pub fn all_distinct(n: usize) -> Self {
        Trace {
            flows: (0..n as u64).map(FlowId).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZipfSpec {
    /// Skew; 0 is uniform.
    pub alpha: f64,
    /// Number of distinct flows that may appear.
    pub universe: u64,
    pub length: usize,
    pub seed: u64,
}

/// Inverse-CDF sampler over ranks `1..=universe` with weight `r^-alpha`.
#[derive(Clone, Debug)]
pub struct ZipfSampler {
    cumulative: Vec<f64>,
}

impl ZipfSampler {
    pub fn new(alpha: f64, universe: u64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(invalid("alpha", "skew must be a finite value >= 0"));
        }
        if universe == 0 {
            return Err(invalid("universe", "must be at least 1"));
        }
        let mut total = 0.0;
        let cumulative = (1..=universe)
            .map(|r| {
                total += libm::pow(r as f64, -alpha);
                total
            })
            .collect();
        Ok(ZipfSampler { cumulative })
    }

    /// Rank in `1..=universe`.
    #[inline]
    pub fn sample(&self, rng: &mut RandomSource) -> u64 {
        let total = *self.cumulative.last().expect("universe >= 1");
        let u = rng.unit() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) as u64 + 1
    }

    /// Probability of rank `r`.
    pub fn probability(&self, rank: u64) -> f64 {
        let i = (rank - 1) as usize;
        let prev = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        (self.cumulative[i] - prev) / self.cumulative[self.cumulative.len() - 1]
    }
}

/// `length` i.i.d. Zipf draws. Rank `r` is flow id `r - 1`.
pub fn generate_zipf(spec: &ZipfSpec) -> Result<Trace> {
    if spec.length == 0 {
        return Err(invalid("length", "must be at least 1"));
    }
    let sampler = ZipfSampler::new(spec.alpha, spec.universe)?;
    let mut rng = RandomSource::new(spec.seed);
    let flows = (0..spec.length)
        .map(|_| FlowId(sampler.sample(&mut rng) - 1))
        .collect();
    Ok(Trace { flows })
}

/// Exact per-flow counts of a trace.
#[derive(Clone, Debug, Default)]
pub struct TraceStats {
    packets: u64,
    freq: HashMap<FlowId, u64>,
    sorted: Vec<u64>,
}

impl TraceStats {
    pub fn from_counts(freq: HashMap<FlowId, u64>) -> Self {
        let mut sorted: Vec<u64> = freq.values().copied().collect();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        TraceStats {
            packets: sorted.iter().sum(),
            freq,
            sorted,
        }
    }

    pub fn packets(&self) -> u64 {
        self.packets
    }

    pub fn distinct(&self) -> usize {
        self.freq.len()
    }

    /// Exact frequency `f_s`.
    pub fn frequency(&self, flow: FlowId) -> u64 {
        self.freq.get(&flow).copied().unwrap_or(0)
    }

    pub fn frequencies(&self) -> &HashMap<FlowId, u64> {
        &self.freq
    }

    /// Frequencies in non-increasing order.
    pub fn rank_frequencies(&self) -> &[u64] {
        &self.sorted
    }

    /// `F_k`, the `k`-th largest frequency (1-based); 0 when `k` exceeds the
    /// number of distinct flows.
    pub fn f_k(&self, k: usize) -> Result<u64> {
        if k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        Ok(self.sorted.get(k - 1).copied().unwrap_or(0))
    }
}

pub fn compute_stats(trace: &Trace) -> TraceStats {
    let mut freq: HashMap<FlowId, u64> = HashMap::new();
    for &f in trace.flows() {
        *freq.entry(f).or_default() += 1;
    }
    TraceStats::from_counts(freq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    const A: FlowId = FlowId(0);
    const B: FlowId = FlowId(1);
    const C: FlowId = FlowId(2);

    #[test]
    fn stats_by_hand() {
        let t = Trace::new(vec![A, A, B, C]).unwrap();
        let s = compute_stats(&t);
        assert_eq!(s.packets(), 4);
        assert_eq!(s.distinct(), 3);
        assert_eq!(s.frequency(A), 2);
        assert_eq!(s.frequency(B), 1);
        assert_eq!(s.f_k(1).unwrap(), 2);
        assert_eq!(s.f_k(2).unwrap(), 1);
        assert_eq!(s.f_k(3).unwrap(), 1);
        assert_eq!(s.f_k(4).unwrap(), 0);
        assert!(s.f_k(0).is_err());
    }

    #[test]
    fn rejects_sentinel_and_bad_params() {
        assert!(Trace::new(vec![FlowId::EMPTY]).is_err());
        let base = ZipfSpec {
            alpha: 1.0,
            universe: 10,
            length: 10,
            seed: 0,
        };
        assert!(generate_zipf(&ZipfSpec {
            universe: 0,
            ..base
        })
        .is_err());
        assert!(generate_zipf(&ZipfSpec {
            alpha: -0.5,
            ..base
        })
        .is_err());
        assert!(generate_zipf(&ZipfSpec {
            alpha: f64::NAN,
            ..base
        })
        .is_err());
        assert!(generate_zipf(&ZipfSpec { length: 0, ..base }).is_err());
    }

    #[test]
    fn same_seed_same_trace() {
        let spec = ZipfSpec {
            alpha: 1.2,
            universe: 1000,
            length: 5000,
            seed: 17,
        };
        assert_eq!(generate_zipf(&spec).unwrap(), generate_zipf(&spec).unwrap());
        let other = generate_zipf(&ZipfSpec { seed: 18, ..spec }).unwrap();
        assert_ne!(generate_zipf(&spec).unwrap(), other);
    }

    #[test]
    fn alpha_zero_is_uniform() {
        let n = 100_000;
        let u = 100;
        let t = generate_zipf(&ZipfSpec {
            alpha: 0.0,
            universe: u,
            length: n,
            seed: 3,
        })
        .unwrap();
        let s = compute_stats(&t);
        assert_eq!(s.distinct(), u as usize);
        let mean = n as f64 / u as f64;
        let sd = (mean * (1.0 - 1.0 / u as f64)).sqrt();
        // 3 sd per bin, Bonferroni-corrected over 100 bins at 0.001: 4.42 sd
        let max = s.f_k(1).unwrap() as f64;
        assert!((max - mean).abs() < 4.42 * sd, "{max} vs {mean}");
        let chi2: f64 = s
            .rank_frequencies()
            .iter()
            .map(|&o| (o as f64 - mean).powi(2) / mean)
            .sum();
        let p = 1.0 - ChiSquared::new((u - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.01, "chi2={chi2} p={p}");
    }

    #[test]
    fn rank_one_share_matches_harmonic_normalization() {
        // oracle: 1 / H(10^5), summed directly in increasing-precision order
        let h: f64 = (1..=100_000u64).rev().map(|r| 1.0 / r as f64).sum();
        let expected = 1.0 / h;
        assert!((expected - 0.0827).abs() < 0.0005, "{expected}");
        let t = generate_zipf(&ZipfSpec {
            alpha: 1.0,
            universe: 100_000,
            length: 1_000_000,
            seed: 9,
        })
        .unwrap();
        let s = compute_stats(&t);
        let share = s.frequency(FlowId(0)) as f64 / 1e6;
        assert!((share - expected).abs() < 0.01, "{share}");
        let sampler = ZipfSampler::new(1.0, 100_000).unwrap();
        assert!((sampler.probability(1) - expected).abs() < 1e-12);
    }

    #[test]
    fn log_log_slope_is_minus_alpha() {
        for alpha in [0.8, 1.0, 1.3] {
            let t = generate_zipf(&ZipfSpec {
                alpha,
                universe: 100_000,
                length: 1_000_000,
                seed: 21,
            })
            .unwrap();
            let s = compute_stats(&t);
            // least-squares fit of ln f against ln r over ranks 1..100
            let pts: Vec<(f64, f64)> = s.rank_frequencies()[..100]
                .iter()
                .enumerate()
                .map(|(i, &f)| (libm::log((i + 1) as f64), libm::log(f as f64)))
                .collect();
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let slope = sxy / sxx;
            assert!((slope + alpha).abs() < 0.1, "alpha={alpha} slope={slope}");
        }
    }

    proptest::proptest! {
        #[test]
        fn conservation(alpha in 0.0f64..2.0, universe in 1u64..500, length in 1usize..2000, seed: u64) {
            let t = generate_zipf(&ZipfSpec { alpha, universe, length, seed }).unwrap();
            let s = compute_stats(&t);
            proptest::prop_assert_eq!(s.packets(), length as u64);
            proptest::prop_assert_eq!(s.frequencies().values().sum::<u64>(), length as u64);
            proptest::prop_assert!(s.distinct() as u64 <= universe);
            let r = s.rank_frequencies();
            proptest::prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
            proptest::prop_assert_eq!(s.f_k(s.distinct()).unwrap(), *r.last().unwrap());
        }
    }
}

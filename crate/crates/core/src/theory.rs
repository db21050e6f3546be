//! Monte-Carlo checks of the recirculation bounds.
//!
//! Two lemmas about sums of geometric variables and the resulting bound on the
//! expected number of recirculations, `E[R] <= 2 sqrt(N C)` for `N` packets
//! and `C` counters.

use alloc::vec::Vec;

use crate::algorithm::HeavyHitter;
use crate::error::{invalid, Result};
use crate::precision::{Precision, PrecisionConfig, ProbMode};
use crate::random::RandomSource;
use crate::traces::Trace;

/// Geometric variable on `{1, 2, ...}` with success probability `p`
/// (mean `1/p`), drawn by inverting the CDF.
#[inline]
pub fn sample_geometric(p: f64, rng: &mut RandomSource) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u = rng.unit_open_closed();
    let x = libm::ceil(libm::log(u) / libm::log1p(-p));
    if x < 1.0 {
        1
    } else {
        x as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Comparison {
    /// `|empirical - analytic| <= tolerance * analytic`.
    Within { tolerance: f64 },
    /// `empirical <= analytic`.
    AtMost,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheckResult {
    pub empirical_mean: f64,
    /// Exact expectation for [`Comparison::Within`], upper bound for
    /// [`Comparison::AtMost`].
    pub analytic: f64,
    pub trials: u64,
    pub comparison: Comparison,
    pub within_bound: bool,
    /// `(empirical - analytic) / analytic`.
    pub relative_gap: f64,
}

impl BoundCheckResult {
    pub fn new(empirical_mean: f64, analytic: f64, trials: u64, comparison: Comparison) -> Self {
        let relative_gap = (empirical_mean - analytic) / analytic;
        let within_bound = match comparison {
            Comparison::Within { tolerance } => libm::fabs(relative_gap) <= tolerance,
            Comparison::AtMost => empirical_mean <= analytic,
        };
        BoundCheckResult {
            empirical_mean,
            analytic,
            trials,
            comparison,
            within_bound,
            relative_gap,
        }
    }

    /// Re-judges the same measurement against `factor * analytic`.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self::new(
            self.empirical_mean,
            self.analytic * factor,
            self.trials,
            self.comparison,
        )
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(invalid("trials", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Number of variables drawn from `next` until their sum reaches `threshold`.
#[inline]
fn crossing_count(threshold: u64, mut next: impl FnMut(u64) -> u64) -> u64 {
    let mut sum = 0u64;
    let mut n = 0u64;
    while sum < threshold {
        n += 1;
        sum = sum.saturating_add(next(n));
    }
    n
}

/// `Z = min{n : X_1 + ... + X_n >= T}` with i.i.d. `X_i ~ Geo(p)` has
/// `E[Z] = p (T - 1) + 1`.
pub fn check_geometric_sum_lemma(
    p: f64,
    threshold: u64,
    trials: u64,
    tolerance: f64,
    seed: u64,
) -> Result<BoundCheckResult> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", "must lie in (0, 1]"));
    }
    if threshold == 0 {
        return Err(invalid("T", "must be at least 1"));
    }
    check_trials(trials)?;
    let mut rng = RandomSource::new(seed);
    let total: u64 = (0..trials)
        .map(|_| crossing_count(threshold, |_| sample_geometric(p, &mut rng)))
        .sum();
    let analytic = p * (threshold - 1) as f64 + 1.0;
    Ok(BoundCheckResult::new(
        total as f64 / trials as f64,
        analytic,
        trials,
        Comparison::Within { tolerance },
    ))
}

/// Mean of `A = min{n : X_1 + ... + X_n >= T}` with independent
/// `X_i ~ Geo(1/i)`.
pub fn counter_growth_mean(threshold: u64, trials: u64, seed: u64) -> Result<f64> {
    if threshold == 0 {
        return Err(invalid("T", "must be at least 1"));
    }
    check_trials(trials)?;
    let mut rng = RandomSource::new(seed);
    let total: u64 = (0..trials)
        .map(|_| crossing_count(threshold, |i| sample_geometric(1.0 / i as f64, &mut rng)))
        .sum();
    Ok(total as f64 / trials as f64)
}

/// `E[A] <= 2 sqrt(T)`.
pub fn check_counter_growth_lemma(
    threshold: u64,
    trials: u64,
    seed: u64,
) -> Result<BoundCheckResult> {
    let mean = counter_growth_mean(threshold, trials, seed)?;
    Ok(BoundCheckResult::new(
        mean,
        2.0 * libm::sqrt(threshold as f64),
        trials,
        Comparison::AtMost,
    ))
}

/// `mean(4T) / mean(T)`; square-root growth gives about 2.
pub fn counter_growth_scaling(threshold: u64, trials: u64, seed: u64) -> Result<f64> {
    let base = counter_growth_mean(threshold, trials, seed)?;
    let quad = counter_growth_mean(threshold.saturating_mul(4), trials, seed ^ 0x9e37_79b9)?;
    Ok(quad / base)
}

/// Recirculations of PRECISION (exact probabilities, zero initial value, no
/// delay) over `n` packets of distinct flows, one run per seed.
pub fn recirculation_counts(
    n: usize,
    d: usize,
    entries_per_way: usize,
    seeds: &[u64],
) -> Result<Vec<u64>> {
    let trace = Trace::all_distinct(n);
    seeds
        .iter()
        .map(|&seed| {
            let mut alg = Precision::new(PrecisionConfig {
                prob_mode: ProbMode::Exact,
                initial_value: 0,
                delay: 0,
                seed,
                ..PrecisionConfig::new(d, entries_per_way)
            })?;
            for p in trace.packets() {
                alg.process(p);
            }
            Ok(alg.stats().recirculations)
        })
        .collect()
}

/// Mean recirculations against `slack * 2 sqrt(N C)` with `C = d * entries_per_way`.
pub fn check_recirculation_bound(
    n: usize,
    d: usize,
    entries_per_way: usize,
    seeds: &[u64],
    slack: f64,
) -> Result<BoundCheckResult> {
    if seeds.is_empty() {
        return Err(invalid("seeds", "at least one seed is required"));
    }
    let counts = recirculation_counts(n, d, entries_per_way, seeds)?;
    let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
    let c = (d * entries_per_way) as f64;
    Ok(BoundCheckResult::new(
        mean,
        slack * 2.0 * libm::sqrt(n as f64 * c),
        seeds.len() as u64,
        Comparison::AtMost,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sampler_mean() {
        let mut rng = RandomSource::new(12);
        for p in [0.5, 0.1, 0.01] {
            let n = 1_000_000;
            let total: u64 = (0..n).map(|_| sample_geometric(p, &mut rng)).sum();
            let mean = total as f64 / n as f64;
            assert!((mean * p - 1.0).abs() < 0.01, "p={p} mean={mean}");
        }
        assert_eq!(sample_geometric(1.0, &mut rng), 1);
    }

    #[test]
    fn geometric_sampler_pmf() {
        // P(X = 1) = p, P(X = 2) = p(1-p)
        let mut rng = RandomSource::new(1);
        let p = 0.3;
        let n = 200_000;
        let mut ones = 0;
        let mut twos = 0;
        for _ in 0..n {
            match sample_geometric(p, &mut rng) {
                1 => ones += 1,
                2 => twos += 1,
                _ => {}
            }
        }
        assert!((ones as f64 / n as f64 - 0.3).abs() < 0.005);
        assert!((twos as f64 / n as f64 - 0.21).abs() < 0.005);
    }

    #[test]
    fn deterministic_geometrics_give_t() {
        let r = check_geometric_sum_lemma(1.0, 17, 100, 0.0, 0).unwrap();
        assert_eq!(r.empirical_mean, 17.0);
        assert_eq!(r.analytic, 17.0);
        assert!(r.within_bound);
    }

    #[test]
    fn lemma_formula_instances() {
        let r = check_geometric_sum_lemma(0.5, 3, 100_000, 0.02, 5).unwrap();
        assert_eq!(r.analytic, 2.0);
        assert!(r.within_bound, "{r:?}");
        let r = check_geometric_sum_lemma(0.1, 100, 100_000, 0.02, 6).unwrap();
        assert!((r.analytic - 10.9).abs() < 1e-12);
        assert!(r.within_bound, "{r:?}");
    }

    #[test]
    fn counter_growth_small_cases() {
        let r = check_counter_growth_lemma(1, 1000, 0).unwrap();
        assert_eq!(r.empirical_mean, 1.0);
        assert_eq!(r.analytic, 2.0);
        let r = check_counter_growth_lemma(10_000, 10_000, 1).unwrap();
        assert!(r.empirical_mean <= 200.0, "{r:?}");
        assert!(r.within_bound);
        let ratio = counter_growth_scaling(10_000, 5_000, 2).unwrap();
        assert!(ratio <= 2.2, "{ratio}");
    }

    #[test]
    fn single_counter_reduces_to_lemma() {
        let n = 20_000;
        let seeds: Vec<u64> = (0..20).collect();
        let r = check_recirculation_bound(n, 1, 1, &seeds, 1.1).unwrap();
        assert!(r.within_bound, "{r:?}");
        assert!((r.analytic - 1.1 * 2.0 * (n as f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn doubling_packets_scales_by_root_two() {
        let seeds: Vec<u64> = (100..120).collect();
        let a = recirculation_counts(100_000, 2, 64, &seeds).unwrap();
        let b = recirculation_counts(200_000, 2, 64, &seeds).unwrap();
        let ma = a.iter().sum::<u64>() as f64 / a.len() as f64;
        let mb = b.iter().sum::<u64>() as f64 / b.len() as f64;
        assert!(mb / ma <= 2f64.sqrt() * 1.15, "{ma} -> {mb}");
    }

    #[test]
    fn rescaling_can_fail_a_check() {
        let r = check_geometric_sum_lemma(0.5, 3, 10_000, 0.02, 5).unwrap();
        assert!(r.within_bound);
        assert!(!r.rescaled(0.5).within_bound);
        let r = check_counter_growth_lemma(100, 1000, 5).unwrap();
        assert!(!r.rescaled(0.25).within_bound);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(check_geometric_sum_lemma(0.0, 3, 10, 0.02, 0).is_err());
        assert!(check_geometric_sum_lemma(1.5, 3, 10, 0.02, 0).is_err());
        assert!(check_geometric_sum_lemma(0.5, 0, 10, 0.02, 0).is_err());
        assert!(check_counter_growth_lemma(0, 10, 0).is_err());
        assert!(check_recirculation_bound(10, 1, 1, &[], 1.1).is_err());
    }
}

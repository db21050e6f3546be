//! The theory checks behind `precision bounds`.

use precision_core::theory::{
    check_counter_growth_lemma, check_geometric_sum_lemma, counter_growth_scaling,
    recirculation_counts, BoundCheckResult, Comparison,
};
use rayon::prelude::*;

use crate::error::{LabError, Result};

pub const GEOMETRIC_CASES: [(f64, u64); 3] = [(0.5, 3), (0.1, 100), (0.01, 1000)];
pub const GROWTH_THRESHOLDS: [u64; 3] = [100, 10_000, 1_000_000];
pub const GEOMETRIC_TOLERANCE: f64 = 0.02;
pub const SCALING_THRESHOLD: u64 = 10_000;
pub const SCALING_LIMIT: f64 = 2.2;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsParams {
    /// Packets in the recirculation experiment.
    pub packets: usize,
    pub counters: usize,
    pub d: usize,
    pub seeds: usize,
    pub seed: u64,
    pub geometric_trials: u64,
    pub growth_trials: u64,
    pub slack: f64,
    /// Multiplies every analytic value before judging; 1 in normal use.
    pub scale: f64,
}

impl Default for BoundsParams {
    fn default() -> Self {
        BoundsParams {
            packets: 1_000_000,
            counters: 1024,
            d: 2,
            seeds: 20,
            seed: 1,
            geometric_trials: 100_000,
            growth_trials: 10_000,
            slack: 1.1,
            scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub params: String,
    pub result: BoundCheckResult,
}

enum Job {
    Geometric(f64, u64),
    Growth(u64),
    Scaling,
}

/// Runs every check. Checks run in parallel, results keep a fixed order.
pub fn run_bounds(p: &BoundsParams) -> Result<Vec<CheckRow>> {
    if p.d == 0 || !p.counters.is_multiple_of(p.d) {
        return Err(LabError::usage(format!(
            "{} counters cannot be split evenly over {} ways",
            p.counters, p.d
        )));
    }
    if p.seeds == 0 || p.packets == 0 {
        return Err(LabError::usage("seeds and packets must be at least 1"));
    }
    let mut jobs: Vec<Job> = GEOMETRIC_CASES
        .iter()
        .map(|&(q, t)| Job::Geometric(q, t))
        .collect();
    jobs.extend(GROWTH_THRESHOLDS.iter().map(|&t| Job::Growth(t)));
    jobs.push(Job::Scaling);
    let mut rows = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let seed = p.seed.wrapping_add(i as u64);
            Ok(match *job {
                Job::Geometric(q, t) => CheckRow {
                    check: "geometric-sum",
                    params: format!("p={q} T={t}"),
                    result: check_geometric_sum_lemma(
                        q,
                        t,
                        p.geometric_trials,
                        GEOMETRIC_TOLERANCE,
                        seed,
                    )?,
                },
                Job::Growth(t) => CheckRow {
                    check: "counter-growth",
                    params: format!("T={t}"),
                    result: check_counter_growth_lemma(t, p.growth_trials, seed)?,
                },
                Job::Scaling => CheckRow {
                    check: "counter-growth-scaling",
                    params: format!("T={SCALING_THRESHOLD} vs 4T"),
                    result: BoundCheckResult::new(
                        counter_growth_scaling(SCALING_THRESHOLD, p.growth_trials, seed)?,
                        SCALING_LIMIT,
                        p.growth_trials,
                        Comparison::AtMost,
                    ),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let width = p.counters / p.d;
    let seeds: Vec<u64> = (0..p.seeds as u64)
        .map(|i| p.seed.wrapping_add(i))
        .collect();
    let counts = seeds
        .par_iter()
        .map(|&s| Ok(recirculation_counts(p.packets, p.d, width, &[s])?[0]))
        .collect::<Result<Vec<u64>>>()?;
    let mean = counts.iter().sum::<u64>() as f64 / counts.len() as f64;
    rows.push(CheckRow {
        check: "recirculations",
        params: format!(
            "N={} C={} d={} slack={}",
            p.packets, p.counters, p.d, p.slack
        ),
        result: BoundCheckResult::new(
            mean,
            p.slack * 2.0 * (p.packets as f64 * p.counters as f64).sqrt(),
            p.seeds as u64,
            Comparison::AtMost,
        ),
    });
    if p.scale != 1.0 {
        for r in &mut rows {
            r.result = r.result.rescaled(p.scale);
        }
    }
    Ok(rows)
}

fn comparison_name(c: Comparison) -> String {
    match c {
        Comparison::Within { tolerance } => format!("within {tolerance}"),
        Comparison::AtMost => "at most".into(),
    }
}

pub fn bounds_csv(rows: &[CheckRow]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "check",
        "params",
        "comparison",
        "empirical_mean",
        "bound",
        "trials",
        "relative_gap",
        "within_bound",
    ])
    .expect("in-memory write");
    for r in rows {
        let b = &r.result;
        w.write_record([
            r.check.to_string(),
            r.params.clone(),
            comparison_name(b.comparison),
            b.empirical_mean.to_string(),
            b.analytic.to_string(),
            b.trials.to_string(),
            b.relative_gap.to_string(),
            b.within_bound.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory writer cannot fail")
}

/// Human-readable table.
pub fn render(rows: &[CheckRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let b = &r.result;
        out.push_str(&format!(
            "{:<4} {:<24} {:<34} mean={:<14.6} bound={:<14.6} ({}, gap {:+.4})\n",
            if b.within_bound { "ok" } else { "FAIL" },
            r.check,
            r.params,
            b.empirical_mean,
            b.analytic,
            comparison_name(b.comparison),
            b.relative_gap,
        ));
    }
    out
}

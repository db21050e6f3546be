//! OnArrival evaluation: every packet's estimate is compared to the exact
//! count of its flow, including the packet itself.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::algorithm::{check_k, rank_top, ArrivalOutcome, HeavyHitter};
use crate::error::Result;
use crate::flow::{FlowId, Packet};
use crate::traces::{Trace, TraceStats};

/// Exact per-flow counter. Also usable as a (memory-unbounded) algorithm.
#[derive(Clone, Debug, Default)]
pub struct ExactOracle {
    counts: HashMap<FlowId, u64>,
    packets: u64,
}

impl ExactOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `flow` and returns its count including this packet.
    #[inline]
    pub fn observe(&mut self, flow: FlowId) -> u64 {
        self.packets += 1;
        let c = self.counts.entry(flow).or_default();
        *c += 1;
        *c
    }

    pub fn count(&self, flow: FlowId) -> u64 {
        self.counts.get(&flow).copied().unwrap_or(0)
    }

    /// The `k`-th largest count so far, 0 when fewer than `k` flows were seen.
    pub fn f_k(&self, k: usize) -> u64 {
        if k == 0 || k > self.counts.len() {
            return 0;
        }
        let mut v: Vec<u64> = self.counts.values().copied().collect();
        let (_, kth, _) = v.select_nth_unstable_by(k - 1, |a, b| b.cmp(a));
        *kth
    }

    pub fn to_stats(&self) -> TraceStats {
        TraceStats::from_counts(self.counts.clone())
    }
}

impl HeavyHitter for ExactOracle {
    fn process(&mut self, p: Packet) -> ArrivalOutcome {
        let matched = self.counts.contains_key(&p.flow);
        ArrivalOutcome {
            matched,
            estimate: self.observe(p.flow),
            recirculated: false,
            carry_min: None,
        }
    }

    fn estimate(&self, flow: FlowId) -> u64 {
        self.count(flow)
    }

    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>> {
        check_k(k)?;
        Ok(rank_top(
            self.counts.iter().map(|(&f, &c)| (f, c)).collect(),
            k,
        ))
    }

    fn memory_counters(&self) -> usize {
        self.counts.len()
    }

    fn describe(&self) -> String {
        String::from("exact")
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Clone, Debug, Default)]
pub struct EvalOptions {
    /// Report recall of `top(k)` at the end of the trace.
    pub k: Option<usize>,
    /// Also record recall every this many packets (requires `k`).
    pub sample_every: Option<usize>,
}

/// Outcome of one OnArrival run.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// Configuration echo of the evaluated instance.
    pub config: String,
    pub packets: u64,
    pub mse: f64,
    pub k: Option<usize>,
    pub recall_at_k: Option<f64>,
    pub recirc_count: u64,
    pub recirc_ratio: f64,
    pub unmatched: u64,
    /// `(packets processed, recall)` samples.
    pub convergence: Vec<(u64, f64)>,
}

/// Runs `alg` over `trace`, querying each packet's flow right after the
/// packet was processed.
pub fn run_on_arrival<A: HeavyHitter + ?Sized>(
    alg: &mut A,
    trace: &Trace,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if let Some(k) = opts.k {
        check_k(k)?;
    }
    if opts.sample_every == Some(0) {
        return Err(crate::error::invalid("sample_every", "must be at least 1"));
    }
    let sample_every = opts.k.and(opts.sample_every);
    let mut oracle = ExactOracle::new();
    let mut sq = CompensatedSum::default();
    let mut recirc = 0u64;
    let mut unmatched = 0u64;
    let mut convergence = Vec::new();
    let n = trace.len();
    for p in trace.packets() {
        let out = alg.process(p);
        let truth = oracle.observe(p.flow);
        let err = out.estimate as f64 - truth as f64;
        sq.add(err * err);
        recirc += u64::from(out.recirculated);
        unmatched += u64::from(!out.matched);
        if let (Some(every), Some(k)) = (sample_every, opts.k) {
            let done = p.seq as usize + 1;
            if done.is_multiple_of(every) || done == n {
                convergence.push((done as u64, recall_against(alg, &oracle, k)?));
            }
        }
    }
    let recall_at_k = match opts.k {
        Some(k) => Some(match convergence.last() {
            Some(&(seen, r)) if seen as usize == n => r,
            _ => recall_against(alg, &oracle, k)?,
        }),
        None => None,
    };
    let packets = n as u64;
    Ok(EvalReport {
        config: alg.describe(),
        packets,
        mse: if n == 0 { 0.0 } else { sq.value() / n as f64 },
        k: opts.k,
        recall_at_k,
        recirc_count: recirc,
        recirc_ratio: if n == 0 {
            0.0
        } else {
            recirc as f64 / n as f64
        },
        unmatched,
        convergence,
    })
}

fn recall_against<A: HeavyHitter + ?Sized>(alg: &A, oracle: &ExactOracle, k: usize) -> Result<f64> {
    let threshold = oracle.f_k(k);
    let hits = alg
        .top(k)?
        .iter()
        .filter(|(f, _)| oracle.count(*f) >= threshold)
        .count();
    Ok(hits as f64 / k as f64)
}

/// `|{e in top(k) : f_e >= F_k}| / k`.
pub fn recall_top_k<A: HeavyHitter + ?Sized>(alg: &A, stats: &TraceStats, k: usize) -> Result<f64> {
    let threshold = stats.f_k(k)?;
    let hits = alg
        .top(k)?
        .iter()
        .filter(|(f, _)| stats.frequency(*f) >= threshold)
        .count();
    Ok(hits as f64 / k as f64)
}

/// Recall of `top(k)` against prefix ground truth every `sample_every`
/// packets and at the end of the trace.
pub fn convergence_curve<A: HeavyHitter + ?Sized>(
    alg: &mut A,
    trace: &Trace,
    k: usize,
    sample_every: usize,
) -> Result<Vec<(u64, f64)>> {
    let report = run_on_arrival(
        alg,
        trace,
        &EvalOptions {
            k: Some(k),
            sample_every: Some(sample_every),
        },
    )?;
    Ok(report.convergence)
}

/// Mean and sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Summary {
                n,
                mean: f64::NAN,
                std_dev: f64::NAN,
            };
        }
        let mut s = CompensatedSum::default();
        values.iter().for_each(|&v| s.add(v));
        let mean = s.value() / n as f64;
        let std_dev = if n < 2 {
            0.0
        } else {
            let mut ss = CompensatedSum::default();
            values.iter().for_each(|&v| ss.add((v - mean) * (v - mean)));
            libm::sqrt(ss.value() / (n - 1) as f64)
        };
        Summary { n, mean, std_dev }
    }
}

impl core::fmt::Display for Summary {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}±{}", self.mean, self.std_dev)
    }
}

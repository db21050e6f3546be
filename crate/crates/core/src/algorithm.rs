//! The shared algorithm contract and a buildable description of every
//! algorithm in the crate.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::baselines::{HashParallel, HashPipe, Rap, SpaceSaving};
use crate::error::{invalid, Result};
use crate::eval::ExactOracle;
use crate::flow::{FlowId, Packet};
use crate::precision::{Precision, PrecisionConfig, ProbMode};

/// What happened to one packet.
///
/// `estimate` is the OnArrival estimate for the packet's flow, taken after the
/// packet has been processed. `carry_min` is the smallest counter the packet
/// saw among the slots that did not match it, when the algorithm tracks one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArrivalOutcome {
    pub matched: bool,
    pub estimate: u64,
    pub recirculated: bool,
    pub carry_min: Option<u64>,
}

/// A streaming heavy-hitter algorithm. `process` is the only mutator.
pub trait HeavyHitter {
    fn process(&mut self, packet: Packet) -> ArrivalOutcome;

    fn estimate(&self, flow: FlowId) -> u64;

    /// The `k` largest entries, ties broken by the smaller flow id.
    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>>;

    /// Number of counters the algorithm is allowed to hold.
    fn memory_counters(&self) -> usize;

    /// Human-readable configuration echo, including seeds.
    fn describe(&self) -> String;
}

impl<T: HeavyHitter + ?Sized> HeavyHitter for Box<T> {
    fn process(&mut self, packet: Packet) -> ArrivalOutcome {
        (**self).process(packet)
    }
    fn estimate(&self, flow: FlowId) -> u64 {
        (**self).estimate(flow)
    }
    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>> {
        (**self).top(k)
    }
    fn memory_counters(&self) -> usize {
        (**self).memory_counters()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(invalid("k", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Sorts by counter descending then flow id ascending, keeps the first `k`.
pub(crate) fn rank_top(mut entries: Vec<(FlowId, u64)>, k: usize) -> Vec<(FlowId, u64)> {
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.truncate(k);
    entries
}

/// Everything needed to build a fresh instance of one algorithm, minus the
/// seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgorithmSpec {
    SpaceSaving {
        capacity: usize,
    },
    /// RAP with a fully associative table.
    Rap {
        capacity: usize,
    },
    /// RAP restricted to one hashed slot per way.
    RapDWay {
        d: usize,
        entries_per_way: usize,
    },
    HashPipe {
        d: usize,
        entries_per_way: usize,
    },
    HashParallel {
        d: usize,
        entries_per_way: usize,
        delay: u64,
    },
    Precision {
        d: usize,
        entries_per_way: usize,
        initial_value: u64,
        prob_mode: ProbMode,
        delay: u64,
        lookup_bits: u32,
    },
    /// Exact per-flow counting; unbounded memory.
    Exact,
}

impl AlgorithmSpec {
    /// Canonical names, as accepted on the command line.
    pub const NAMES: &'static [&'static str] = &[
        "space-saving",
        "rap",
        "rap-dway",
        "hashpipe",
        "hashparallel",
        "precision",
        "exact",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmSpec::SpaceSaving { .. } => "space-saving",
            AlgorithmSpec::Rap { .. } => "rap",
            AlgorithmSpec::RapDWay { .. } => "rap-dway",
            AlgorithmSpec::HashPipe { .. } => "hashpipe",
            AlgorithmSpec::HashParallel { .. } => "hashparallel",
            AlgorithmSpec::Precision { .. } => "precision",
            AlgorithmSpec::Exact => "exact",
        }
    }

    /// PRECISION with the given memory and defaults for everything else
    /// (exact probabilities, no delay, zero initial value, 16 lookup bits).
    pub fn precision(d: usize, entries_per_way: usize) -> Self {
        AlgorithmSpec::Precision {
            d,
            entries_per_way,
            initial_value: 0,
            prob_mode: ProbMode::Exact,
            delay: 0,
            lookup_bits: PrecisionConfig::DEFAULT_LOOKUP_BITS,
        }
    }

    /// Way count; 1 for fully associative and exact algorithms.
    pub fn ways(&self) -> usize {
        match *self {
            AlgorithmSpec::RapDWay { d, .. }
            | AlgorithmSpec::HashPipe { d, .. }
            | AlgorithmSpec::HashParallel { d, .. }
            | AlgorithmSpec::Precision { d, .. } => d,
            _ => 1,
        }
    }

    /// Total counters, `None` for exact counting.
    pub fn counters(&self) -> Option<usize> {
        match *self {
            AlgorithmSpec::SpaceSaving { capacity } | AlgorithmSpec::Rap { capacity } => {
                Some(capacity)
            }
            AlgorithmSpec::RapDWay { d, entries_per_way }
            | AlgorithmSpec::HashPipe { d, entries_per_way }
            | AlgorithmSpec::HashParallel {
                d, entries_per_way, ..
            }
            | AlgorithmSpec::Precision {
                d, entries_per_way, ..
            } => Some(d * entries_per_way),
            AlgorithmSpec::Exact => None,
        }
    }

    pub fn prob_mode(&self) -> Option<ProbMode> {
        match *self {
            AlgorithmSpec::Precision { prob_mode, .. } => Some(prob_mode),
            _ => None,
        }
    }

    pub fn delay(&self) -> u64 {
        match *self {
            AlgorithmSpec::Precision { delay, .. } | AlgorithmSpec::HashParallel { delay, .. } => {
                delay
            }
            _ => 0,
        }
    }

    pub fn initial_value(&self) -> u64 {
        match *self {
            AlgorithmSpec::Precision { initial_value, .. } => initial_value,
            _ => 0,
        }
    }

    /// Same algorithm with `counters` total counters, keeping the way count.
    pub fn with_counters(&self, counters: usize) -> Result<Self> {
        let per_way = |d: usize| -> Result<usize> {
            if d == 0 || !counters.is_multiple_of(d) || counters == 0 {
                Err(invalid(
                    "counters",
                    format!("{counters} counters cannot be split evenly over {d} ways"),
                ))
            } else {
                Ok(counters / d)
            }
        };
        let mut out = self.clone();
        match &mut out {
            AlgorithmSpec::SpaceSaving { capacity } | AlgorithmSpec::Rap { capacity } => {
                if counters == 0 {
                    return Err(invalid("counters", "must be at least 1"));
                }
                *capacity = counters;
            }
            AlgorithmSpec::RapDWay { d, entries_per_way }
            | AlgorithmSpec::HashPipe { d, entries_per_way }
            | AlgorithmSpec::HashParallel {
                d, entries_per_way, ..
            }
            | AlgorithmSpec::Precision {
                d, entries_per_way, ..
            } => *entries_per_way = per_way(*d)?,
            AlgorithmSpec::Exact => {}
        }
        Ok(out)
    }

    pub fn build(&self, seed: u64) -> Result<Box<dyn HeavyHitter + Send>> {
        Ok(match *self {
            AlgorithmSpec::SpaceSaving { capacity } => Box::new(SpaceSaving::new(capacity)?),
            AlgorithmSpec::Rap { capacity } => Box::new(Rap::full(capacity, seed)?),
            AlgorithmSpec::RapDWay { d, entries_per_way } => {
                Box::new(Rap::limited(d, entries_per_way, seed)?)
            }
            AlgorithmSpec::HashPipe { d, entries_per_way } => {
                Box::new(HashPipe::new(d, entries_per_way, seed)?)
            }
            AlgorithmSpec::HashParallel {
                d,
                entries_per_way,
                delay,
            } => Box::new(HashParallel::new(d, entries_per_way, delay, seed)?),
            AlgorithmSpec::Precision {
                d,
                entries_per_way,
                initial_value,
                prob_mode,
                delay,
                lookup_bits,
            } => Box::new(Precision::new(PrecisionConfig {
                d,
                entries_per_way,
                initial_value,
                prob_mode,
                delay,
                seed,
                lookup_bits,
            })?),
            AlgorithmSpec::Exact => Box::new(ExactOracle::new()),
        })
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlgorithmSpec::SpaceSaving { capacity } | AlgorithmSpec::Rap { capacity } => {
                write!(f, "{}(counters={capacity})", self.name())
            }
            AlgorithmSpec::RapDWay { d, entries_per_way }
            | AlgorithmSpec::HashPipe { d, entries_per_way } => {
                write!(f, "{}(d={d},width={entries_per_way})", self.name())
            }
            AlgorithmSpec::HashParallel {
                d,
                entries_per_way,
                delay,
            } => write!(f, "hashparallel(d={d},width={entries_per_way},delay={delay})"),
            AlgorithmSpec::Precision {
                d,
                entries_per_way,
                initial_value,
                prob_mode,
                delay,
                lookup_bits,
            } => write!(
                f,
                "precision(d={d},width={entries_per_way},init={initial_value},mode={prob_mode},delay={delay},lookup_bits={lookup_bits})"
            ),
            AlgorithmSpec::Exact => f.write_str("exact"),
        }
    }
}

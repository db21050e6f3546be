use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::summary::SummaryTable;
use crate::algorithm::{check_k, rank_top, ArrivalOutcome, HeavyHitter};
use crate::error::{invalid, Result};
use crate::flow::{FlowId, Packet};
use crate::hash::{mix64, HashFamily};
use crate::precision::RNG_STREAM;
use crate::random::RandomSource;
use crate::table::WayTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RapMode {
    /// Evicts the global minimum.
    Full,
    /// Evicts the minimum of the `d` slots the flow hashes to.
    Limited { d: usize },
}

#[derive(Clone, Debug)]
enum Storage {
    Full(SummaryTable),
    Limited { table: WayTable, hashes: HashFamily },
}

/// Randomized Admission Policy.
///
/// An unmonitored flow takes over the minimum entry `c` with probability
/// `1/(c+1)`, writing `c+1`; otherwise the packet is dropped from the
/// summary. Free slots count as `c = 0`.
#[derive(Clone, Debug)]
pub struct Rap {
    storage: Storage,
    rng: RandomSource,
    seed: u64,
    forced_admission: bool,
}

impl Rap {
    pub fn full(capacity: usize, seed: u64) -> Result<Self> {
        if capacity == 0 {
            return Err(invalid("capacity", "must be at least 1"));
        }
        Ok(Self::with_storage(
            Storage::Full(SummaryTable::new(capacity)),
            seed,
        ))
    }

    pub fn limited(d: usize, entries_per_way: usize, seed: u64) -> Result<Self> {
        let storage = Storage::Limited {
            table: WayTable::new(d, entries_per_way, 0)?,
            hashes: HashFamily::new(d, entries_per_way, seed)?,
        };
        Ok(Self::with_storage(storage, seed))
    }

    fn with_storage(storage: Storage, seed: u64) -> Self {
        Rap {
            storage,
            rng: RandomSource::new(mix64(seed ^ RNG_STREAM)),
            seed,
            forced_admission: false,
        }
    }

    /// Admits every unmonitored flow. With a full table this is Space-Saving.
    pub fn with_forced_admission(mut self) -> Self {
        self.forced_admission = true;
        self
    }

    pub fn mode(&self) -> RapMode {
        match &self.storage {
            Storage::Full(_) => RapMode::Full,
            Storage::Limited { table, .. } => RapMode::Limited { d: table.ways() },
        }
    }

    /// Occupied entries sorted by flow.
    pub fn entries(&self) -> Vec<(FlowId, u64)> {
        let mut e = match &self.storage {
            Storage::Full(t) => t.entries(),
            Storage::Limited { table, .. } => table.occupied().map(|(_, _, f, v)| (f, v)).collect(),
        };
        e.sort_unstable();
        e
    }

    #[inline]
    fn admit(&mut self, c: u64) -> bool {
        self.forced_admission || c == 0 || self.rng.below(c.saturating_add(1)) == 0
    }

    fn process_full(&mut self, flow: FlowId) -> ArrivalOutcome {
        let Storage::Full(t) = &mut self.storage else {
            unreachable!()
        };
        if let Some(c) = t.increment(flow) {
            return ArrivalOutcome {
                matched: true,
                estimate: c,
                recirculated: false,
                carry_min: None,
            };
        }
        let full = t.is_full();
        let c = if full { t.min().map_or(0, |m| m.0) } else { 0 };
        let estimate = if self.admit(c) {
            let Storage::Full(t) = &mut self.storage else {
                unreachable!()
            };
            if full {
                t.replace_min(flow, c + 1);
            } else {
                t.insert(flow, 1);
            }
            c + 1
        } else {
            c
        };
        ArrivalOutcome {
            matched: false,
            estimate,
            recirculated: false,
            carry_min: Some(c),
        }
    }

    fn process_limited(&mut self, flow: FlowId) -> ArrivalOutcome {
        let Storage::Limited { table, hashes } = &mut self.storage else {
            unreachable!()
        };
        let mut min: Option<(u64, usize, usize)> = None;
        for way in 0..table.ways() {
            let slot = hashes.slot(way, flow);
            let (key, val) = table.get(way, slot);
            if key == flow {
                let v = table.add(way, slot, 1);
                return ArrivalOutcome {
                    matched: true,
                    estimate: v,
                    recirculated: false,
                    carry_min: None,
                };
            }
            let val = if key.is_empty() { 0 } else { val };
            if min.is_none_or(|(m, _, _)| val < m) {
                min = Some((val, way, slot));
            }
        }
        let (c, way, slot) = min.expect("d >= 1");
        let estimate = if self.admit(c) {
            let Storage::Limited { table, .. } = &mut self.storage else {
                unreachable!()
            };
            table.set(way, slot, flow, c + 1);
            c + 1
        } else {
            c
        };
        ArrivalOutcome {
            matched: false,
            estimate,
            recirculated: false,
            carry_min: Some(c),
        }
    }
}

impl HeavyHitter for Rap {
    fn process(&mut self, p: Packet) -> ArrivalOutcome {
        match self.storage {
            Storage::Full(_) => self.process_full(p.flow),
            Storage::Limited { .. } => self.process_limited(p.flow),
        }
    }

    fn estimate(&self, flow: FlowId) -> u64 {
        match &self.storage {
            Storage::Full(t) => t.estimate(flow),
            Storage::Limited { table, hashes } => {
                let mut min = u64::MAX;
                for way in 0..table.ways() {
                    let (key, val) = table.get(way, hashes.slot(way, flow));
                    if key == flow {
                        return val;
                    }
                    min = min.min(if key.is_empty() { 0 } else { val });
                }
                min
            }
        }
    }

    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>> {
        check_k(k)?;
        Ok(rank_top(self.entries(), k))
    }

    fn memory_counters(&self) -> usize {
        match &self.storage {
            Storage::Full(t) => t.capacity(),
            Storage::Limited { table, .. } => table.capacity(),
        }
    }

    fn describe(&self) -> String {
        match &self.storage {
            Storage::Full(t) => format!("rap(counters={},seed={})", t.capacity(), self.seed),
            Storage::Limited { table, .. } => format!(
                "rap-dway(d={},width={},seed={})",
                table.ways(),
                table.width(),
                self.seed
            ),
        }
    }
}

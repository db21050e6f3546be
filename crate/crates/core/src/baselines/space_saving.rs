use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::summary::SummaryTable;
use crate::algorithm::{check_k, rank_top, ArrivalOutcome, HeavyHitter};
use crate::error::{invalid, Result};
use crate::flow::{FlowId, Packet};

/// Space-Saving over `capacity` counters.
///
/// An unmonitored flow replaces the minimum entry and inherits its count plus
/// one, so counters always sum to the number of packets processed and never
/// underestimate.
#[derive(Clone, Debug)]
pub struct SpaceSaving {
    table: SummaryTable,
    packets: u64,
}

impl SpaceSaving {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(invalid("capacity", "must be at least 1"));
        }
        Ok(SpaceSaving {
            table: SummaryTable::new(capacity),
            packets: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.len() == 0
    }

    pub fn packets(&self) -> u64 {
        self.packets
    }

    /// Sum of all counters; equals [`Self::packets`].
    pub fn counter_sum(&self) -> u64 {
        self.table.total()
    }

    /// Smallest counter, counting free slots as zero.
    pub fn min_counter(&self) -> u64 {
        if self.table.is_full() {
            self.table.min().map_or(0, |m| m.0)
        } else {
            0
        }
    }

    /// Monitored flows and their counters, sorted by flow.
    pub fn entries(&self) -> Vec<(FlowId, u64)> {
        let mut e = self.table.entries();
        e.sort_unstable();
        e
    }
}

impl HeavyHitter for SpaceSaving {
    fn process(&mut self, p: Packet) -> ArrivalOutcome {
        self.packets += 1;
        if let Some(c) = self.table.increment(p.flow) {
            return ArrivalOutcome {
                matched: true,
                estimate: c,
                recirculated: false,
                carry_min: None,
            };
        }
        let estimate = if self.table.is_full() {
            let min = self.min_counter();
            self.table.replace_min(p.flow, min + 1);
            min + 1
        } else {
            self.table.insert(p.flow, 1);
            1
        };
        ArrivalOutcome {
            matched: false,
            estimate,
            recirculated: false,
            carry_min: None,
        }
    }

    fn estimate(&self, flow: FlowId) -> u64 {
        self.table.estimate(flow)
    }

    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>> {
        check_k(k)?;
        Ok(rank_top(self.table.entries(), k))
    }

    fn memory_counters(&self) -> usize {
        self.table.capacity()
    }

    fn describe(&self) -> String {
        format!("space-saving(counters={})", self.table.capacity())
    }
}

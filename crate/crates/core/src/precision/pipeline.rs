//! Way table with recirculated writes that land some packets later.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::algorithm::rank_top;
use crate::error::Result;
use crate::flow::FlowId;
use crate::hash::HashFamily;
use crate::table::WayTable;

/// A write carried by a recirculated packet. Applied once, overwriting
/// whatever the slot holds at that time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PendingWrite {
    pub apply_at_seq: u64,
    pub way: usize,
    pub slot: usize,
    pub key: FlowId,
    pub value: u64,
}

/// Result of the first pipeline traversal for one packet.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Traversal {
    /// Largest post-increment counter among matching ways.
    pub max_match: Option<u64>,
    /// `(value, way, slot)` of the smallest non-matching sampled slot.
    pub carry: Option<(u64, usize, usize)>,
}

#[derive(Clone, Debug)]
pub(crate) struct DelayedTable {
    pub table: WayTable,
    pub hashes: HashFamily,
    pending: VecDeque<PendingWrite>,
    delay: u64,
}

impl DelayedTable {
    pub fn new(
        d: usize,
        entries_per_way: usize,
        initial_value: u64,
        delay: u64,
        seed: u64,
    ) -> Result<Self> {
        Ok(DelayedTable {
            table: WayTable::new(d, entries_per_way, initial_value)?,
            hashes: HashFamily::new(d, entries_per_way, seed)?,
            pending: VecDeque::new(),
            delay,
        })
    }

    pub fn pending(&self) -> impl ExactSizeIterator<Item = &PendingWrite> {
        self.pending.iter()
    }

    pub fn apply_pending(&mut self, up_to_seq: u64) -> usize {
        let mut applied = 0;
        // apply_at_seq is non-decreasing because the delay is constant
        while let Some(w) = self.pending.front() {
            if w.apply_at_seq > up_to_seq {
                break;
            }
            self.table.set(w.way, w.slot, w.key, w.value);
            self.pending.pop_front();
            applied += 1;
        }
        applied
    }

    /// Makes visible every write that has been in flight for `delay` packets
    /// by the time packet `seq` arrives.
    #[inline]
    pub fn advance_to(&mut self, seq: u64) -> usize {
        match seq.checked_sub(1) {
            Some(prev) => self.apply_pending(prev),
            None => 0,
        }
    }

    /// Stages `i_A`, `i_B`, `i_C` for every way: match and increment, or
    /// track the carried minimum with strict `<` (lowest way wins ties).
    #[inline]
    pub fn traverse(&mut self, flow: FlowId) -> Traversal {
        let mut t = Traversal::default();
        for way in 0..self.table.ways() {
            let slot = self.hashes.slot(way, flow);
            let (key, val) = self.table.get(way, slot);
            if key == flow {
                let v = self.table.add(way, slot, 1);
                t.max_match = Some(t.max_match.map_or(v, |m| m.max(v)));
            } else if t.carry.is_none_or(|(min, _, _)| val < min) {
                t.carry = Some((val, way, slot));
            }
        }
        t
    }

    pub fn schedule(&mut self, seq: u64, way: usize, slot: usize, key: FlowId, value: u64) {
        self.pending.push_back(PendingWrite {
            apply_at_seq: seq.saturating_add(self.delay),
            way,
            slot,
            key,
            value,
        });
    }

    /// Max over matching ways, else the min over the sampled slots.
    pub fn estimate(&self, flow: FlowId) -> u64 {
        let mut best: Option<u64> = None;
        let mut min = u64::MAX;
        for way in 0..self.table.ways() {
            let (key, val) = self.table.get(way, self.hashes.slot(way, flow));
            if key == flow {
                best = Some(best.map_or(val, |b| b.max(val)));
            }
            min = min.min(val);
        }
        best.unwrap_or(min)
    }

    /// Occupied entries with duplicate keys merged by max.
    pub fn top(&self, k: usize) -> Vec<(FlowId, u64)> {
        let mut entries: Vec<(FlowId, u64)> =
            self.table.occupied().map(|(_, _, f, v)| (f, v)).collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        entries.dedup_by_key(|e| e.0);
        rank_top(entries, k)
    }
}

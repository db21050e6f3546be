use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algorithm::{check_k, rank_top, ArrivalOutcome, HeavyHitter};
use crate::error::Result;
use crate::flow::{FlowId, Packet};
use crate::hash::HashFamily;
use crate::table::WayTable;

/// HashPipe: always insert in the first stage, then carry the evicted entry
/// down the pipeline, keeping the larger counter at each stage and dropping
/// whatever is still carried after stage `d`.
///
/// A flow can end up in several stages at once; queries sum the copies.
#[derive(Clone, Debug)]
pub struct HashPipe {
    table: WayTable,
    hashes: HashFamily,
    seed: u64,
}

impl HashPipe {
    pub fn new(d: usize, entries_per_way: usize, seed: u64) -> Result<Self> {
        Ok(HashPipe {
            table: WayTable::new(d, entries_per_way, 0)?,
            hashes: HashFamily::new(d, entries_per_way, seed)?,
            seed,
        })
    }

    pub fn table(&self) -> &WayTable {
        &self.table
    }

    /// Slot of `flow` in stage `way` (0-based).
    pub fn slot_of(&self, way: usize, flow: FlowId) -> Result<usize> {
        self.hashes.hash_way(way, flow)
    }

    /// Test hook: overwrites one slot.
    #[doc(hidden)]
    pub fn set_slot(&mut self, way: usize, slot: usize, key: FlowId, val: u64) {
        self.table.set(way, slot, key, val);
    }

    fn insert(&mut self, flow: FlowId) -> bool {
        let slot = self.hashes.slot(0, flow);
        let (key, val) = self.table.get(0, slot);
        if key == flow {
            self.table.add(0, slot, 1);
            return true;
        }
        self.table.set(0, slot, flow, 1);
        if key.is_empty() {
            return false;
        }
        let (mut ckey, mut cval) = (key, val);
        for way in 1..self.table.ways() {
            let slot = self.hashes.slot(way, ckey);
            let (key, val) = self.table.get(way, slot);
            if key == ckey {
                self.table.add(way, slot, cval);
                return false;
            } else if key.is_empty() {
                self.table.set(way, slot, ckey, cval);
                return false;
            } else if val < cval {
                self.table.set(way, slot, ckey, cval);
                (ckey, cval) = (key, val);
            }
        }
        false
    }
}

impl HeavyHitter for HashPipe {
    fn process(&mut self, p: Packet) -> ArrivalOutcome {
        let matched = self.insert(p.flow);
        ArrivalOutcome {
            matched,
            estimate: self.estimate(p.flow),
            recirculated: false,
            carry_min: None,
        }
    }

    fn estimate(&self, flow: FlowId) -> u64 {
        (0..self.table.ways())
            .map(|way| self.table.get(way, self.hashes.slot(way, flow)))
            .filter(|&(key, _)| key == flow)
            .map(|(_, val)| val)
            .sum()
    }

    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>> {
        check_k(k)?;
        let mut entries: Vec<(FlowId, u64)> =
            self.table.occupied().map(|(_, _, f, v)| (f, v)).collect();
        entries.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(FlowId, u64)> = Vec::with_capacity(entries.len());
        for (f, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == f => last.1 += v,
                _ => merged.push((f, v)),
            }
        }
        Ok(rank_top(merged, k))
    }

    fn memory_counters(&self) -> usize {
        self.table.capacity()
    }

    fn describe(&self) -> String {
        format!(
            "hashpipe(d={},width={},seed={})",
            self.table.ways(),
            self.table.width(),
            self.seed
        )
    }
}

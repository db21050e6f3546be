use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::flow::FlowId;

/// Fully associative flow table with access to its minimum entry.
///
/// Ordered by `(counter, flow)`, so the minimum is unique and replay is
/// deterministic.
#[derive(Clone, Debug)]
pub(crate) struct SummaryTable {
    capacity: usize,
    counts: HashMap<FlowId, u64>,
    order: BTreeSet<(u64, FlowId)>,
}

impl SummaryTable {
    pub fn new(capacity: usize) -> Self {
        SummaryTable {
            capacity,
            counts: HashMap::with_capacity(capacity),
            order: BTreeSet::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_full(&self) -> bool {
        self.counts.len() >= self.capacity
    }

    pub fn get(&self, flow: FlowId) -> Option<u64> {
        self.counts.get(&flow).copied()
    }

    pub fn min(&self) -> Option<(u64, FlowId)> {
        self.order.first().copied()
    }

    /// Increments a monitored flow; returns the new count.
    pub fn increment(&mut self, flow: FlowId) -> Option<u64> {
        let c = self.counts.get_mut(&flow)?;
        self.order.remove(&(*c, flow));
        *c += 1;
        self.order.insert((*c, flow));
        Some(*c)
    }

    pub fn insert(&mut self, flow: FlowId, count: u64) {
        debug_assert!(!self.is_full() && !self.counts.contains_key(&flow));
        self.counts.insert(flow, count);
        self.order.insert((count, flow));
    }

    /// Evicts the minimum entry in favour of `(flow, count)`.
    pub fn replace_min(&mut self, flow: FlowId, count: u64) {
        if let Some((c, old)) = self.order.pop_first() {
            let removed = self.counts.remove(&old);
            debug_assert_eq!(removed, Some(c));
        }
        self.counts.insert(flow, count);
        self.order.insert((count, flow));
    }

    /// Monitored count, else the minimum counter of a full table, else 0.
    pub fn estimate(&self, flow: FlowId) -> u64 {
        match self.get(flow) {
            Some(c) => c,
            None if self.is_full() => self.min().map_or(0, |m| m.0),
            None => 0,
        }
    }

    pub fn entries(&self) -> Vec<(FlowId, u64)> {
        self.counts.iter().map(|(&f, &c)| (f, c)).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

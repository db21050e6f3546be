use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::flow::FlowId;

/// `d` parallel register arrays of `(key, counter)` slots.
///
/// Stored flat, `way * width + slot`. Unclaimed slots hold
/// [`FlowId::EMPTY`] and the table's initial counter value.
#[derive(Clone, Debug)]
pub struct WayTable {
    ways: usize,
    width: usize,
    keys: Vec<FlowId>,
    vals: Vec<u64>,
}

impl WayTable {
    pub fn new(ways: usize, width: usize, initial_value: u64) -> Result<Self> {
        if ways == 0 {
            return Err(invalid("d", "at least one way is required"));
        }
        if width == 0 {
            return Err(invalid("entries_per_way", "must be at least 1"));
        }
        let n = ways
            .checked_mul(width)
            .ok_or_else(|| invalid("entries_per_way", "table too large"))?;
        Ok(WayTable {
            ways,
            width,
            keys: vec![FlowId::EMPTY; n],
            vals: vec![initial_value; n],
        })
    }

    pub fn ways(&self) -> usize {
        self.ways
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    #[inline]
    fn idx(&self, way: usize, slot: usize) -> usize {
        debug_assert!(way < self.ways && slot < self.width);
        way * self.width + slot
    }

    #[inline]
    pub fn key(&self, way: usize, slot: usize) -> FlowId {
        self.keys[self.idx(way, slot)]
    }

    #[inline]
    pub fn val(&self, way: usize, slot: usize) -> u64 {
        self.vals[self.idx(way, slot)]
    }

    #[inline]
    pub fn get(&self, way: usize, slot: usize) -> (FlowId, u64) {
        let i = self.idx(way, slot);
        (self.keys[i], self.vals[i])
    }

    #[inline]
    pub fn set(&mut self, way: usize, slot: usize, key: FlowId, val: u64) {
        let i = self.idx(way, slot);
        self.keys[i] = key;
        self.vals[i] = val;
    }

    #[inline]
    pub fn add(&mut self, way: usize, slot: usize, delta: u64) -> u64 {
        let i = self.idx(way, slot);
        self.vals[i] = self.vals[i].saturating_add(delta);
        self.vals[i]
    }

    /// Occupied slots as `(way, slot, key, value)`.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, FlowId, u64)> + '_ {
        self.keys
            .iter()
            .zip(&self.vals)
            .enumerate()
            .filter(|(_, (k, _))| !k.is_empty())
            .map(move |(i, (&k, &v))| (i / self.width, i % self.width, k, v))
    }

    pub fn occupied_count(&self) -> usize {
        self.keys.iter().filter(|k| !k.is_empty()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_empty_with_initial_value() {
        let t = WayTable::new(2, 3, 100).unwrap();
        assert_eq!(t.capacity(), 6);
        assert_eq!(t.occupied_count(), 0);
        assert_eq!(t.get(1, 2), (FlowId::EMPTY, 100));
    }

    #[test]
    fn set_and_iterate() {
        let mut t = WayTable::new(2, 4, 0).unwrap();
        t.set(1, 3, FlowId(9), 5);
        assert_eq!(t.add(1, 3, 2), 7);
        let occ: Vec<_> = t.occupied().collect();
        assert_eq!(occ, vec![(1, 3, FlowId(9), 7)]);
    }

    #[test]
    fn rejects_zero_dimensions() {
        assert!(WayTable::new(0, 4, 0).is_err());
        assert!(WayTable::new(4, 0, 0).is_err());
    }
}

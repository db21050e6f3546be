use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algorithm::{check_k, ArrivalOutcome, HeavyHitter};
use crate::error::Result;
use crate::flow::{FlowId, Packet};
use crate::precision::pipeline::DelayedTable;
use crate::table::WayTable;

/// HashParallel: PRECISION's layout, but every unmatched packet is
/// recirculated to replace the minimum of its `d` slots with `min + 1`.
#[derive(Clone, Debug)]
pub struct HashParallel {
    state: DelayedTable,
    seed: u64,
    recirculations: u64,
}

impl HashParallel {
    pub fn new(d: usize, entries_per_way: usize, delay: u64, seed: u64) -> Result<Self> {
        Ok(HashParallel {
            state: DelayedTable::new(d, entries_per_way, 0, delay, seed)?,
            seed,
            recirculations: 0,
        })
    }

    pub fn recirculations(&self) -> u64 {
        self.recirculations
    }

    pub fn table(&self) -> &WayTable {
        &self.state.table
    }
}

impl HeavyHitter for HashParallel {
    fn process(&mut self, p: Packet) -> ArrivalOutcome {
        self.state.advance_to(p.seq);
        let t = self.state.traverse(p.flow);
        if let Some(v) = t.max_match {
            return ArrivalOutcome {
                matched: true,
                estimate: v,
                recirculated: false,
                carry_min: t.carry.map(|c| c.0),
            };
        }
        let (min, way, slot) = t.carry.expect("d >= 1");
        self.state
            .schedule(p.seq, way, slot, p.flow, min.saturating_add(1));
        self.recirculations += 1;
        ArrivalOutcome {
            matched: false,
            estimate: min,
            recirculated: true,
            carry_min: Some(min),
        }
    }

    fn estimate(&self, flow: FlowId) -> u64 {
        self.state.estimate(flow)
    }

    fn top(&self, k: usize) -> Result<Vec<(FlowId, u64)>> {
        check_k(k)?;
        Ok(self.state.top(k))
    }

    fn memory_counters(&self) -> usize {
        self.state.table.capacity()
    }

    fn describe(&self) -> String {
        format!(
            "hashparallel(d={},width={},seed={})",
            self.state.table.ways(),
            self.state.table.width(),
            self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_flow_recirculates_once() {
        let mut hp = HashParallel::new(2, 16, 0, 4).unwrap();
        let n = 1000;
        for i in 0..n {
            hp.process(Packet::new(FlowId(9), i));
        }
        assert_eq!(hp.recirculations(), 1);
        assert_eq!(hp.estimate(FlowId(9)), n);
    }

    #[test]
    fn distinct_flows_all_recirculate() {
        let mut hp = HashParallel::new(2, 1 << 12, 0, 4).unwrap();
        let u = 500;
        for i in 0..u {
            assert!(hp.process(Packet::new(FlowId(i), i)).recirculated);
        }
        assert_eq!(hp.recirculations(), u);
    }

    proptest::proptest! {
        #[test]
        fn recirculates_exactly_when_unmatched(
            flows in proptest::collection::vec(0u64..60, 1..500),
            delay in 0u64..8,
        ) {
            let mut hp = HashParallel::new(2, 8, delay, 2).unwrap();
            let mut unmatched = 0u64;
            for (i, &f) in flows.iter().enumerate() {
                let o = hp.process(Packet::new(FlowId(f), i as u64));
                proptest::prop_assert_eq!(o.recirculated, !o.matched);
                unmatched += u64::from(!o.matched);
            }
            proptest::prop_assert_eq!(unmatched, hp.recirculations());
        }
    }
}

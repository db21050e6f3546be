//! PRECISION: `d`-way heavy-hitter tracking with probabilistic recirculation.
//!
//! Every packet walks the `d` register arrays once. A packet whose flow is
//! found increments that counter. A packet whose flow is not found remembers
//! the smallest counter it passed (`carry_min`) and, at the end of the
//! pipeline, is cloned and recirculated with probability about
//! `1/(carry_min+1)`. The clone claims the minimal slot on its second pass,
//! `delay` packets later, overwriting whatever increments happened in between.

mod decision;
pub(crate) mod pipeline;
mod stages;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use decision::{recirc_decision, ProbMode, RecircDecision};
pub use pipeline::PendingWrite;
pub use stages::stage_count;

use crate::algorithm::{check_k, ArrivalOutcome, HeavyHitter};
use crate::error::{invalid, Result};
use crate::flow::{FlowId, Packet};
use crate::hash::mix64;
use crate::random::RandomSource;
use crate::table::WayTable;
use pipeline::DelayedTable;

// separates the coin stream from the hash seeds derived from the same seed
pub(crate) const RNG_STREAM: u64 = 0x243f_6a88_85a3_08d3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub d: usize,
    pub entries_per_way: usize,
    /// Value preloaded into every counter. `V` caps the recirculation
    /// probability at `1/(V+1)`.
    pub initial_value: u64,
    pub prob_mode: ProbMode,
    /// Packets between the recirculation decision and its write.
    pub delay: u64,
    pub seed: u64,
    /// Width of the random draw used by [`ProbMode::NineEighths`].
    pub lookup_bits: u32,
}

impl PrecisionConfig {
    pub const DEFAULT_LOOKUP_BITS: u32 = 16;

    pub fn new(d: usize, entries_per_way: usize) -> Self {
        PrecisionConfig {
            d,
            entries_per_way,
            initial_value: 0,
            prob_mode: ProbMode::Exact,
            delay: 0,
            seed: 0,
            lookup_bits: Self::DEFAULT_LOOKUP_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "at least one way is required"));
        }
        if self.entries_per_way == 0 {
            return Err(invalid("entries_per_way", "must be at least 1"));
        }
        if !(4..=64).contains(&self.lookup_bits) {
            return Err(invalid("lookup_bits", "must be in 4..=64"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PrecisionStats {
    pub packets: u64,
    pub matched: u64,
    pub recirculations: u64,
    pub writes_applied: u64,
}

#[derive(Clone, Debug)]
pub struct Precision {
    config: PrecisionConfig,
    state: DelayedTable,
    rng: RandomSource,
    stats: PrecisionStats,
}

impl Precision {
    pub fn new(config: PrecisionConfig) -> Result<Self> {
        config.validate()?;
        Ok(Precision {
            state: DelayedTable::new(
                config.d,
                config.entries_per_way,
                config.initial_value,
                config.delay,
                config.seed,
            )?,
            rng: RandomSource::new(mix64(config.seed ^ RNG_STREAM)),
            stats: PrecisionStats::default(),
            config,
        })
    }

    pub fn config(&self) -> &PrecisionConfig {
        &self.config
    }

    pub fn stats(&self) -> PrecisionStats {
        self.stats
    }

    pub fn table(&self) -> &WayTable {
        &self.state.table
    }

    pub fn pending(&self) -> impl ExactSizeIterator<Item = &PendingWrite> {
        self.state.pending()
    }

    /// Slot of `flow` in way `way`.
    pub fn slot_of(&self, way: usize, flow: FlowId) -> Result<usize> {
        self.state.hashes.hash_way(way, flow)
    }

    /// Applies every pending write due at or before `up_to_seq`.
    pub fn apply_pending(&mut self, up_to_seq: u64) -> usize {
        let n = self.state.apply_pending(up_to_seq);
        self.stats.writes_applied += n as u64;
        n
    }

    /// Lands every write still in flight.
    pub fn flush(&mut self) -> usize {
        self.apply_pending(u64::MAX)
    }

    /// Processes one packet and also returns the coin used for it, if any.
    pub fn process_with_decision(&mut self, p: Packet) -> (ArrivalOutcome, Option<RecircDecision>) {
        self.stats.writes_applied += self.state.advance_to(p.seq) as u64;
        self.stats.packets += 1;
        let t = self.state.traverse(p.flow);
        if let Some(v) = t.max_match {
            self.stats.matched += 1;
            let out = ArrivalOutcome {
                matched: true,
                estimate: v,
                recirculated: false,
                carry_min: t.carry.map(|c| c.0),
            };
            return (out, None);
        }
        // no way matched, so every way contributed to the carry
        let (carry_min, way, slot) = t.carry.expect("d >= 1");
        let decision = recirc_decision(carry_min, self.config.prob_mode, self.config.lookup_bits);
        let recirculated = decision.sample(&mut self.rng);
        if recirculated {
            self.state
                .schedule(p.seq, way, slot, p.flow, decision.new_value);
            self.stats.recirculations += 1;
        }
        let out = ArrivalOutcome {
            matched: false,
            estimate: carry_min,
            recirculated,
            carry_min: Some(carry_min),
        };
        (out, Some(decision))
    }

    /// Test hook: overwrites one slot.
    #[doc(hidden)]
    pub fn set_slot(&mut self, way: usize, slot: usize, key: FlowId, val: u64) {
        self.state.table.set(way, slot, key, val);
    }
}

impl HeavyHitter for Precision {
    fn process(&mut self, packet: Packet) -> ArrivalOutcome {
        self.process_with_decision(packet).0
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
        let c = &self.config;
        format!(
            "precision(d={},width={},init={},mode={},delay={},lookup_bits={},seed={})",
            c.d, c.entries_per_way, c.initial_value, c.prob_mode, c.delay, c.lookup_bits, c.seed
        )
    }
}

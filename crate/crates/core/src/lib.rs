//! Heavy-hitter detection for RMT-style match-action pipelines.
//!
//! The crate models the register-array layout a programmable switch exposes
//! (`d` ways of `(key, counter)` slots, one access per stage) and implements
//! PRECISION on top of it: probabilistic recirculation of unmatched packets,
//! delayed writes, initial counter values and the bit-only probability
//! approximations. Space-Saving, RAP, HashPipe and HashParallel are provided as
//! baselines behind the same [`HeavyHitter`] interface, together with an
//! OnArrival evaluator and Monte-Carlo checks of the recirculation bounds.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algorithm;
pub mod baselines;
pub mod error;
pub mod eval;
pub mod flow;
pub mod hash;
pub mod precision;
pub mod random;
pub mod table;
pub mod theory;
pub mod traces;

pub use algorithm::{AlgorithmSpec, ArrivalOutcome, HeavyHitter};
pub use error::{Error, Result};
pub use flow::{FlowId, Packet};
pub use hash::HashFamily;
pub use precision::{Precision, PrecisionConfig, ProbMode};
pub use random::RandomSource;
pub use table::WayTable;

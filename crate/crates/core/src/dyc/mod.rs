//! Deterministic Y channel: model, capacity bounds, scheme synthesis, and
//! bit-exact simulation.
//!
//! Three users talk through a relay over binary words of length `q = n1`.
//! User `j` reaches the relay through a down-shift by `q - n_j`, so only its
//! top `n_j` bits arrive; the downlink applies the same shift to the relay
//! word. Everything here is exact: GF(2) words, integer level indices, and
//! rational rates.

pub mod channel;
pub mod regions;
pub mod scheme;
pub mod simulate;

pub use channel::{BinaryWord, ChannelError, DycParams, RelayMap};
pub use regions::{cutset_region, outer_region, redundant_cutset_rows};
pub use scheme::{
    build_plan, expand_rational, reduce_params, split_rates, validate_plan, InfeasibleReason,
    LevelPlan, PlanError, RateSplit, ReducedParams, Stream, StreamKind,
};
pub use simulate::{
    simulate, simulate_exhaustive, simulate_random, DecodingReport, Messages, SimError,
    SweepReport,
};

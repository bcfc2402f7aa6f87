//! Gaussian Y channel: bounds, sector-aware power allocation, and the
//! constant-gap certificate.
//!
//! Rates here are real numbers in bits per channel use, evaluated in `f64`.
//! The outer bound is a fixed set of log-form inequalities in the received
//! SNRs; the achievability side splits a tuple into two-way, cyclic, and
//! one-way sub-rates, picks closed-form transmit and relay power shares for
//! the active sectors, and checks every decoding constraint. Shifting the
//! outer bound in by 7/6 bit per rate always lands inside what the
//! allocation supports, which is the constant-gap certificate.

pub mod alloc;
pub mod config;
pub mod constraints;
pub mod regions;
pub mod sample;
pub mod subrates;

pub use alloc::{allocate_powers, AllocError, AlphaSet, BetaSet, PowerAllocation};
pub use config::{ChannelConfig, ConfigError};
pub use constraints::{
    eval_rate_constraints, verify_achievability, AchievabilityReport, ConstraintRecord, Link,
};
pub use regions::{
    cap, cap_plus, check_gap, inner_target_region, outer_region, GapReport, GAP_BITS,
};
pub use subrates::{assign_subrates, classify_sector, SubRateError, SubRates};

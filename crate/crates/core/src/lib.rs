//! Capacity bounds and coding schemes for the three-user Y relay channel.
//!
//! Three users exchange six unicast messages through a single relay; there
//! are no direct links. The crate covers two channel models:
//!
//! * [`dyc`]: the deterministic (shift-matrix) model over GF(2). Rate tuples
//!   use exact rational arithmetic, the outer bound is a small polytope, and
//!   a capacity-achieving scheme can be synthesized and simulated bit by bit.
//! * [`gyc`]: the Gaussian model. Bounds are evaluated in `f64`, and a
//!   closed-form power allocation certifies that the achievable region is
//!   within 7/6 bit per rate of the outer bound at any SNR.
//!
//! Shared plumbing lives in [`rate`] (rate tuples, exact parsing) and
//! [`region`] (half-space regions, integer-grid enumeration, JSON).

pub mod dyc;
pub mod gyc;
pub mod rate;
pub mod region;

pub use rate::{Rat, RateTuple};
pub use region::{Inequality, LinearRegion};

//! Decoding constraints that certify a power allocation.
//!
//! [`allocate_powers`] fixes every stream's power share; this module
//! replays the two successive-decoding chains and records, for each
//! stream, the rate the chain supports against the interference actually
//! present. A stream passes when that supported rate covers the rate the
//! stream carries. Together with the transmit power budgets this is a
//! complete certificate: if everything passes, the rate tuple is
//! achievable on the channel.
//!
//! Uplink the relay first peels the streams aligned to user 3, then user
//! 2's, then user 1's. An aligned pair arrives with twice the share of
//! its weaker sender and decoding the lattice sum loses half a bit, so
//! pair slots support `C(2 a H / I) - 1/2`. Downlink each user peels its
//! incoming codewords under the interference of the groups decoded at
//! stronger users, with no half-bit loss.

use super::alloc::{allocate_powers, AllocError, PowerAllocation};
use super::config::ChannelConfig;
use super::regions::cap;
use crate::rate::RateTuple;

/// Which hop a constraint belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Uplink,
    Downlink,
}

/// One decoding step and the rate it must support.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConstraintRecord {
    /// Stable name of the decoding step, e.g. `up-c123-bot`.
    pub id: &'static str,
    pub link: Link,
    /// Rate the stream carries.
    pub rate: f64,
    /// Rate the decoding step supports.
    pub supported: f64,
    /// `supported - rate`; non-negative means the step succeeds.
    pub slack: f64,
    /// Pair slots with zero rate send nothing, and their half-bit
    /// penalty would report a spurious deficit; such rows are kept for
    /// completeness but marked inactive.
    pub active: bool,
}

/// Evaluates all 26 decoding steps for an allocation. Order is fixed:
/// the 13 uplink steps from the last-decoded stream of user 1 down to
/// the first-decoded stream of user 3, then the 13 downlink steps in
/// the same orientation (user 3's group first).
pub fn eval_rate_constraints(
    cfg: &ChannelConfig,
    alloc: &PowerAllocation,
) -> Vec<ConstraintRecord> {
    let h1 = cfg.snr(1);
    let h2 = cfg.snr(2);
    let h3 = cfg.snr(3);
    let a = &alloc.alpha;
    let b = &alloc.beta;
    let s = &alloc.sub;

    // Received power of the user-3 aligned block plus relay noise. Every
    // stream decoded after that block sees it as residual interference.
    let sigma2 = 1.0
        + (2.0 * a.a32b + 2.0 * a.a31b + 2.0 * a.a31c + 2.0 * a.a32c + a.a32u + a.a31u) * h3;
    // Same for the aligned pairs of user 2's block.
    let d2 = 2.0 * (a.a21b + a.a23c_top + a.a21c) * h2;

    let mut rows = Vec::with_capacity(26);
    let mut up = |id, rate, num: f64, den: f64, paired: bool| {
        let supported = if paired { cap(num / den) - 0.5 } else { cap(num / den) };
        rows.push(ConstraintRecord {
            id,
            link: Link::Uplink,
            rate,
            supported,
            slack: supported - rate,
            active: !paired || rate > 0.0,
        });
    };

    up(
        "up-u12",
        s.uni[0],
        a.a12u * h1,
        sigma2 + d2 + a.a13u * h1 + (a.a21u + a.a23u) * h2,
        false,
    );
    up(
        "up-u13",
        s.uni[1],
        a.a13u * h1,
        sigma2 + d2 + (a.a21u + a.a23u) * h2,
        false,
    );
    up("up-u21", s.uni[2], a.a21u * h2, sigma2 + d2 + a.a23u * h2, false);
    up("up-u23", s.uni[3], a.a23u * h2, sigma2 + d2, false);
    up(
        "up-c132-top",
        s.cyc132,
        2.0 * a.a21c * h2,
        sigma2 + 2.0 * (a.a21b + a.a23c_top) * h2,
        true,
    );
    up(
        "up-c123-top",
        s.cyc123,
        2.0 * a.a23c_top * h2,
        sigma2 + 2.0 * a.a21b * h2,
        true,
    );
    up("up-b12", s.bidir[0], 2.0 * a.a21b * h2, sigma2, true);
    up(
        "up-u31",
        s.uni[4],
        a.a31u * h3,
        1.0 + (2.0 * (a.a32b + a.a31b + a.a31c + a.a32c) + a.a32u) * h3,
        false,
    );
    up(
        "up-u32",
        s.uni[5],
        a.a32u * h3,
        1.0 + 2.0 * (a.a32b + a.a31b + a.a31c + a.a32c) * h3,
        false,
    );
    up(
        "up-c132-bot",
        s.cyc132,
        2.0 * a.a32c * h3,
        1.0 + 2.0 * (a.a32b + a.a31b + a.a31c) * h3,
        true,
    );
    up(
        "up-c123-bot",
        s.cyc123,
        2.0 * a.a31c * h3,
        1.0 + 2.0 * (a.a32b + a.a31b) * h3,
        true,
    );
    up("up-b13", s.bidir[1], 2.0 * a.a31b * h3, 1.0 + 2.0 * a.a32b * h3, true);
    up("up-b23", s.bidir[2], 2.0 * a.a32b * h3, 1.0, true);

    let mut dn = |id, rate, num: f64, den: f64| {
        let supported = cap(num / den);
        rows.push(ConstraintRecord {
            id,
            link: Link::Downlink,
            rate,
            supported,
            slack: supported - rate,
            active: true,
        });
    };

    // Share granted to the groups of users 1 and 2, which user 3 cannot
    // cancel.
    let carried = b.b12u + b.b32u + b.b12c + b.b21c + b.b21b + b.b21u + b.b31u;
    dn(
        "dn-u13",
        s.uni[1],
        b.b13u * h3,
        1.0 + (b.b23u + b.b32c + b.b31c + b.b31b + b.b32b + carried) * h3,
    );
    dn(
        "dn-u23",
        s.uni[3],
        b.b23u * h3,
        1.0 + (b.b32c + b.b31c + b.b31b + b.b32b + carried) * h3,
    );
    dn(
        "dn-c132-u3",
        s.cyc132,
        b.b32c * h3,
        1.0 + (b.b31c + b.b31b + b.b32b + carried) * h3,
    );
    dn(
        "dn-c123-u3",
        s.cyc123,
        b.b31c * h3,
        1.0 + (b.b31b + b.b32b + carried) * h3,
    );
    dn("dn-b13", s.bidir[1], b.b31b * h3, 1.0 + (b.b32b + carried) * h3);
    dn("dn-b23", s.bidir[2], b.b32b * h3, 1.0 + carried * h3);
    dn(
        "dn-u12",
        s.uni[0],
        b.b12u * h2,
        1.0 + (b.b32u + b.b12c + b.b21c + b.b21b + b.b21u + b.b31u) * h2,
    );
    dn(
        "dn-u32",
        s.uni[5],
        b.b32u * h2,
        1.0 + (b.b12c + b.b21c + b.b21b + b.b21u + b.b31u) * h2,
    );
    dn(
        "dn-c123-u2",
        s.cyc123,
        b.b12c * h2,
        1.0 + (b.b21c + b.b21b + b.b21u + b.b31u) * h2,
    );
    dn(
        "dn-c132-u2",
        s.cyc132,
        b.b21c * h2,
        1.0 + (b.b21b + b.b21u + b.b31u) * h2,
    );
    dn("dn-b12", s.bidir[0], b.b21b * h2, 1.0 + (b.b21u + b.b31u) * h2);
    dn("dn-u21", s.uni[2], b.b21u * h1, 1.0 + b.b31u * h1);
    dn("dn-u31", s.uni[4], b.b31u * h1, 1.0);

    rows
}

/// Full achievability certificate for one rate tuple.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AchievabilityReport {
    pub allocation: PowerAllocation,
    /// All 26 decoding steps, see [`eval_rate_constraints`].
    pub constraints: Vec<ConstraintRecord>,
    /// Power budget fraction in use at users 1, 2, 3. Must stay within 1.
    pub source_power: [f64; 3],
    /// Power budget fraction in use at the relay. Must stay within 1.
    pub relay_power: f64,
    /// Smallest slack over the active decoding steps.
    pub min_slack: f64,
    /// True when every active step and every power budget holds within
    /// the tolerance.
    pub ok: bool,
}

/// Synthesizes the power allocation for `rates` (in role order, strongest
/// user first) and checks the complete certificate: all 26 decoding steps
/// and all four power budgets, each within `tol`.
pub fn verify_achievability(
    cfg: &ChannelConfig,
    rates: &RateTuple<f64>,
    tol: f64,
) -> Result<AchievabilityReport, AllocError> {
    let allocation = allocate_powers(cfg, rates)?;
    let constraints = eval_rate_constraints(cfg, &allocation);
    let source_power = [
        allocation.source_power(1),
        allocation.source_power(2),
        allocation.source_power(3),
    ];
    let relay_power = allocation.relay_power();
    let min_slack = constraints
        .iter()
        .filter(|c| c.active)
        .map(|c| c.slack)
        .fold(f64::INFINITY, f64::min);
    let ok = min_slack >= -tol
        && source_power.iter().all(|&p| p <= 1.0 + tol)
        && relay_power <= 1.0 + tol;
    Ok(AchievabilityReport {
        allocation,
        constraints,
        source_power,
        relay_power,
        min_slack,
        ok,
    })
}

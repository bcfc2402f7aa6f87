//! Rate splitting and synthesis of capacity-achieving level plans.
//!
//! A tuple of six integer rates is first decomposed into two-way, cyclic,
//! and one-way traffic ([`split_rates`]). Two-way traffic is served by XOR
//! on shared levels and costs one level per bit on users 1 and 2; cyclic
//! traffic is served by two aligned chunks and costs two levels on users 1
//! and 2 and one on user 3; what remains is routed as plain one-way streams
//! over the leftover levels. [`reduce_params`] tracks the level budget left
//! after each stage, and [`build_plan`] performs the actual placement,
//! succeeding exactly when the tuple lies in the eight-row outer bound.

use std::collections::BTreeSet;
use std::fmt;

use num::{Signed, Zero};
use serde_json::{json, Value};

use crate::rate::{Rat, RateTuple, DIRECTIONS};

use super::channel::{DycParams, RelayMap};

/// Decomposition of a rate tuple into exchange patterns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RateSplit {
    /// Two-way rates for the pairs (1,2), (1,3), (2,3).
    pub bidir: [u32; 3],
    /// Common rate around the cycle 1 -> 2 -> 3 -> 1.
    pub cyc123: u32,
    /// Common rate around the cycle 1 -> 3 -> 2 -> 1.
    pub cyc132: u32,
    /// Leftover one-way rates in tuple order.
    pub uni: [u32; 6],
}

fn pair_index(a: u8, b: u8) -> usize {
    match (a.min(b), a.max(b)) {
        (1, 2) => 0,
        (1, 3) => 1,
        (2, 3) => 2,
        _ => panic!("no user pair ({a},{b})"),
    }
}

/// True when the flow src -> dst lies on the cycle 1 -> 2 -> 3 -> 1.
fn on_cycle_123(src: u8, dst: u8) -> bool {
    matches!((src, dst), (1, 2) | (2, 3) | (3, 1))
}

impl RateSplit {
    pub fn bidir_of(&self, src: u8, dst: u8) -> u32 {
        self.bidir[pair_index(src, dst)]
    }

    pub fn cyc_of(&self, src: u8, dst: u8) -> u32 {
        if on_cycle_123(src, dst) {
            self.cyc123
        } else {
            self.cyc132
        }
    }

    pub fn uni_of(&self, src: u8, dst: u8) -> u32 {
        self.uni[crate::rate::dir_index(src, dst)]
    }

    /// Message length of the flow src -> dst.
    pub fn message_len(&self, src: u8, dst: u8) -> u32 {
        self.bidir_of(src, dst) + self.cyc_of(src, dst) + self.uni_of(src, dst)
    }

    /// Bit ranges of the two-way, cyclic, and one-way parts within the
    /// message for src -> dst. Messages are laid out in that order.
    pub fn layout(&self, src: u8, dst: u8) -> [std::ops::Range<usize>; 3] {
        let b = self.bidir_of(src, dst) as usize;
        let c = self.cyc_of(src, dst) as usize;
        let u = self.uni_of(src, dst) as usize;
        [0..b, b..b + c, b + c..b + c + u]
    }

    /// Recomposes the original rate tuple.
    pub fn totals(&self) -> [u32; 6] {
        let mut out = [0u32; 6];
        for (i, (s, d)) in DIRECTIONS.iter().enumerate() {
            out[i] = self.message_len(*s, *d);
        }
        out
    }
}

/// Splits a tuple into two-way, cyclic, and one-way components.
///
/// Two-way traffic takes the overlap of each opposing pair; one cycle
/// direction then takes the overlap of its three residual flows. The two
/// cycles cannot both survive the first stage, so at most one of `cyc123`
/// and `cyc132` is nonzero and the residual one-way pattern is acyclic.
pub fn split_rates(rates: [u32; 6]) -> RateSplit {
    let r = |s: u8, d: u8| rates[crate::rate::dir_index(s, d)];
    let bidir = [
        r(1, 2).min(r(2, 1)),
        r(1, 3).min(r(3, 1)),
        r(2, 3).min(r(3, 2)),
    ];
    let mut rest = [0u32; 6];
    for (i, (s, d)) in DIRECTIONS.iter().enumerate() {
        rest[i] = rates[i] - bidir[pair_index(*s, *d)];
    }
    let rr = |s: u8, d: u8| rest[crate::rate::dir_index(s, d)];
    let cyc123 = rr(1, 2).min(rr(2, 3)).min(rr(3, 1));
    let cyc132 = rr(1, 3).min(rr(3, 2)).min(rr(2, 1));
    debug_assert!(cyc123 == 0 || cyc132 == 0);
    let mut uni = [0u32; 6];
    for (i, (s, d)) in DIRECTIONS.iter().enumerate() {
        let cyc = if on_cycle_123(*s, *d) { cyc123 } else { cyc132 };
        uni[i] = rest[i] - cyc;
    }
    RateSplit { bidir, cyc123, cyc132, uni }
}

/// Level budgets remaining after serving the two-way and cyclic stages.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ReducedParams {
    pub after_bidir: DycParams,
    pub after_cyclic: DycParams,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum InfeasibleReason {
    /// Two-way traffic touching user 3 exceeds its level count.
    BidirExceedsUser3 { required: u32, capacity: u32 },
    /// Total two-way traffic exceeds user 2's level count.
    BidirExceedsUser2 { required: u32, capacity: u32 },
    /// The cyclic chunk visible to user 3 does not fit its leftover levels.
    CyclicExceedsUser3 { required: u32, capacity: u32 },
    /// Both cyclic chunks together do not fit user 2's leftover levels.
    CyclicExceedsUser2 { required: u32, capacity: u32 },
    /// A one-way stream would need a level above its source's reach.
    UplinkExceedsUser { user: u8, level: u32, capacity: u32 },
    /// A one-way stream would need a level above its destination's reach.
    DownlinkExceedsUser { user: u8, level: u32, capacity: u32 },
    /// More one-way bits than levels on the named link.
    NotEnoughLevels { uplink: bool },
    /// The tuple violates the named row of the outer bound.
    OutsideOuterBound { row: String },
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfeasibleReason::BidirExceedsUser3 { required, capacity } => write!(
                f,
                "two-way traffic at user 3 needs {required} levels, has {capacity}"
            ),
            InfeasibleReason::BidirExceedsUser2 { required, capacity } => write!(
                f,
                "total two-way traffic needs {required} levels, user 2 has {capacity}"
            ),
            InfeasibleReason::CyclicExceedsUser3 { required, capacity } => write!(
                f,
                "cyclic chunk at user 3 needs {required} levels, {capacity} left"
            ),
            InfeasibleReason::CyclicExceedsUser2 { required, capacity } => write!(
                f,
                "cyclic chunks at user 2 need {required} levels, {capacity} left"
            ),
            InfeasibleReason::UplinkExceedsUser { user, level, capacity } => write!(
                f,
                "uplink level {level} is above user {user}'s reach of {capacity}"
            ),
            InfeasibleReason::DownlinkExceedsUser { user, level, capacity } => write!(
                f,
                "downlink level {level} is above user {user}'s reach of {capacity}"
            ),
            InfeasibleReason::NotEnoughLevels { uplink } => write!(
                f,
                "{} has fewer free levels than one-way bits",
                if *uplink { "uplink" } else { "downlink" }
            ),
            InfeasibleReason::OutsideOuterBound { row } => {
                write!(f, "violates the bound {row}")
            }
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum PlanError {
    /// Rates must be non-negative.
    NegativeRate,
    /// Rates must be integers (expand rationals first).
    FractionalRate,
    /// The tuple lies outside the capacity region.
    Infeasible(InfeasibleReason),
    /// Clearing denominators would need words longer than 64 bits.
    ExpansionTooLarge { factor: i64, word_len: i64 },
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::NegativeRate => write!(f, "rates must be non-negative"),
            PlanError::FractionalRate => write!(f, "rates must be integers"),
            PlanError::Infeasible(reason) => write!(f, "infeasible: {reason}"),
            PlanError::ExpansionTooLarge { factor, word_len } => write!(
                f,
                "denominator expansion by {factor} needs {word_len}-bit words (limit 64)"
            ),
        }
    }
}

impl std::error::Error for PlanError {}

/// Checks the two-way and cyclic stages against the level budget and
/// returns the reduced profiles after each stage.
pub fn reduce_params(p: &DycParams, split: &RateSplit) -> Result<ReducedParams, PlanError> {
    let [n1, n2, n3] = p.levels();
    let [b12, b13, b23] = split.bidir;
    let b_total = b12 + b13 + b23;
    let b_user3 = b13 + b23;
    if b_user3 > n3 {
        return Err(PlanError::Infeasible(InfeasibleReason::BidirExceedsUser3 {
            required: b_user3,
            capacity: n3,
        }));
    }
    if b_total > n2 {
        return Err(PlanError::Infeasible(InfeasibleReason::BidirExceedsUser2 {
            required: b_total,
            capacity: n2,
        }));
    }
    let n1p = n1 - b_total;
    let n2p = n2 - b_total;
    let n3p = (n3 - b_user3).min(n2p);
    let after_bidir = DycParams::new(n1p, n2p, n3p).expect("reduction preserves ordering");

    let c = split.cyc123 + split.cyc132;
    if c > n3p {
        return Err(PlanError::Infeasible(InfeasibleReason::CyclicExceedsUser3 {
            required: c,
            capacity: n3p,
        }));
    }
    if 2 * c > n2p {
        return Err(PlanError::Infeasible(InfeasibleReason::CyclicExceedsUser2 {
            required: 2 * c,
            capacity: n2p,
        }));
    }
    let n1pp = n1p - 2 * c;
    let n2pp = n2p - 2 * c;
    let n3pp = (n3p - c).min(n2pp);
    let after_cyclic = DycParams::new(n1pp, n2pp, n3pp).expect("reduction preserves ordering");

    Ok(ReducedParams { after_bidir, after_cyclic })
}

/// One placed stream: `rate` bits, bit `t` riding uplink level `up[t]` and
/// downlink level `down[t]`. Level lists are ascending.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Stream {
    pub id: String,
    pub kind: StreamKind,
    pub rate: u32,
    pub up: Vec<u32>,
    pub down: Vec<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StreamKind {
    /// Users `a` and `b` exchange bits by XOR on shared levels.
    Bidir { a: u8, b: u8 },
    /// One aligned chunk of a cyclic exchange. `order123` selects the cycle
    /// 1 -> 2 -> 3 -> 1; `top` selects the chunk placed at the high end of
    /// user 2's window.
    Cyclic { order123: bool, top: bool },
    Uni { src: u8, dst: u8 },
}

impl StreamKind {
    /// Users that put bits on this stream's uplink levels.
    pub fn senders(&self) -> Vec<u8> {
        match *self {
            StreamKind::Bidir { a, b } => vec![a, b],
            StreamKind::Cyclic { order123, top } => match (order123, top) {
                (true, true) => vec![1, 2],
                (true, false) => vec![2, 3],
                (false, true) => vec![1, 2],
                (false, false) => vec![1, 3],
            },
            StreamKind::Uni { src, .. } => vec![src],
        }
    }

    /// Users that must observe this stream's downlink levels to decode.
    pub fn readers(&self) -> Vec<u8> {
        match *self {
            StreamKind::Bidir { a, b } => vec![a, b],
            StreamKind::Cyclic { order123, top } => match (order123, top) {
                (true, true) => vec![1, 2],
                (true, false) => vec![1, 3],
                (false, true) => vec![1, 2],
                (false, false) => vec![2, 3],
            },
            StreamKind::Uni { dst, .. } => vec![dst],
        }
    }
}

/// Complete transmission recipe for one channel use.
#[derive(Clone, PartialEq, Debug)]
pub struct LevelPlan {
    pub params: DycParams,
    pub rates: [u32; 6],
    pub split: RateSplit,
    pub streams: Vec<Stream>,
    pub relay_map: RelayMap,
}

fn take_levels(
    free: &mut BTreeSet<u32>,
    count: u32,
    visible_to: &[u8],
    p: &DycParams,
    uplink: bool,
) -> Result<Vec<u32>, PlanError> {
    let mut taken = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let level = *free
            .iter()
            .next()
            .ok_or(PlanError::Infeasible(InfeasibleReason::NotEnoughLevels { uplink }))?;
        for &user in visible_to {
            let capacity = p.n_of(user);
            if level > capacity {
                return Err(PlanError::Infeasible(if uplink {
                    InfeasibleReason::UplinkExceedsUser { user, level, capacity }
                } else {
                    InfeasibleReason::DownlinkExceedsUser { user, level, capacity }
                }));
            }
        }
        free.remove(&level);
        taken.push(level);
    }
    Ok(taken)
}

fn claim_block(free: &mut BTreeSet<u32>, lo: u32, hi: u32) -> Vec<u32> {
    let levels: Vec<u32> = (lo..=hi).collect();
    for l in &levels {
        let was_free = free.remove(l);
        debug_assert!(was_free, "level {l} already claimed");
    }
    levels
}

/// Synthesizes a level plan for integer rates, or reports why none exists.
///
/// Succeeds exactly when the tuple lies in [`super::regions::outer_region`].
pub fn build_plan(p: &DycParams, rates: [u32; 6]) -> Result<LevelPlan, PlanError> {
    let split = split_rates(rates);
    let reduced = reduce_params(p, &split)?;
    let q = p.n1();
    let n2 = p.n2();
    let mut up_free: BTreeSet<u32> = (1..=q).collect();
    let mut dn_free: BTreeSet<u32> = (1..=q).collect();
    let mut streams: Vec<Stream> = Vec::new();

    // Two-way blocks: the pair (1,2) sits at the top of user 2's window,
    // pairs involving user 3 stack from the bottom. Uplink and downlink use
    // the same level numbers, so each XOR bit returns on the level it rode in
    // on and both partners can remove their own contribution.
    let [b12, b13, b23] = split.bidir;
    let push_bidir = |streams: &mut Vec<Stream>,
                          up_free: &mut BTreeSet<u32>,
                          dn_free: &mut BTreeSet<u32>,
                          a: u8,
                          b: u8,
                          lo: u32,
                          hi: u32| {
        let levels = claim_block(up_free, lo, hi);
        claim_block(dn_free, lo, hi);
        streams.push(Stream {
            id: format!("b{a}{b}"),
            kind: StreamKind::Bidir { a, b },
            rate: hi - lo + 1,
            up: levels.clone(),
            down: levels,
        });
    };
    if b12 > 0 {
        push_bidir(&mut streams, &mut up_free, &mut dn_free, 1, 2, n2 - b12 + 1, n2);
    }
    if b13 > 0 {
        push_bidir(&mut streams, &mut up_free, &mut dn_free, 1, 3, 1, b13);
    }
    if b23 > 0 {
        push_bidir(&mut streams, &mut up_free, &mut dn_free, 2, 3, b13 + 1, b13 + b23);
    }

    // Cyclic chunks: in the leftover window the lower chunk takes the c
    // lowest free levels (user 3 can reach them on both links) and the upper
    // chunk the top of user 2's leftover reach. The two chunks carry
    // overlapping cycle flows, so each user can peel the chunk XOR with what
    // it already knows.
    let c = split.cyc123 + split.cyc132;
    if c > 0 {
        let order123 = split.cyc123 > 0;
        let n2p = reduced.after_bidir.n2();
        let up_list: Vec<u32> = up_free.iter().copied().collect();
        let dn_list: Vec<u32> = dn_free.iter().copied().collect();
        let c = c as usize;
        let n2p = n2p as usize;
        let lower_up = up_list[..c].to_vec();
        let upper_up = up_list[n2p - c..n2p].to_vec();
        let lower_dn = dn_list[..c].to_vec();
        let upper_dn = dn_list[n2p - c..n2p].to_vec();
        for level in lower_up.iter().chain(&upper_up) {
            up_free.remove(level);
        }
        for level in lower_dn.iter().chain(&upper_dn) {
            dn_free.remove(level);
        }
        let order = if order123 { "123" } else { "132" };
        streams.push(Stream {
            id: format!("c{order}-top"),
            kind: StreamKind::Cyclic { order123, top: true },
            rate: c as u32,
            up: upper_up,
            down: upper_dn,
        });
        streams.push(Stream {
            id: format!("c{order}-bot"),
            kind: StreamKind::Cyclic { order123, top: false },
            rate: c as u32,
            up: lower_up,
            down: lower_dn,
        });
    }

    // One-way streams: sources (destinations) with the smallest reach claim
    // the lowest free uplink (downlink) levels first. Visibility is checked
    // against the original profile, which is exactly as strict as the
    // leftover-budget bookkeeping.
    let uni = |s: u8, d: u8| split.uni[crate::rate::dir_index(s, d)];
    let mut up_levels: Vec<(u8, u8, Vec<u32>)> = Vec::new();
    for (src, dst) in [(3, 1), (3, 2), (2, 1), (2, 3), (1, 2), (1, 3)] {
        let rate = uni(src, dst);
        if rate > 0 {
            let levels = take_levels(&mut up_free, rate, &[src], p, true)?;
            up_levels.push((src, dst, levels));
        }
    }
    let mut dn_levels: Vec<(u8, u8, Vec<u32>)> = Vec::new();
    for (src, dst) in [(1, 3), (2, 3), (1, 2), (3, 2), (2, 1), (3, 1)] {
        let rate = uni(src, dst);
        if rate > 0 {
            let levels = take_levels(&mut dn_free, rate, &[dst], p, false)?;
            dn_levels.push((src, dst, levels));
        }
    }
    for (src, dst, up) in up_levels {
        let down = dn_levels
            .iter()
            .find(|(s, d, _)| (*s, *d) == (src, dst))
            .map(|(_, _, l)| l.clone())
            .expect("uplink and downlink cover the same one-way streams");
        streams.push(Stream {
            id: format!("u{src}{dst}"),
            kind: StreamKind::Uni { src, dst },
            rate: uni(src, dst),
            up,
            down,
        });
    }

    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for s in &streams {
        pairs.extend(s.up.iter().copied().zip(s.down.iter().copied()));
    }
    let relay_map =
        RelayMap::from_level_pairs(p.q(), &pairs).expect("plan levels are disjoint");

    Ok(LevelPlan { params: *p, rates, split, streams, relay_map })
}

/// Structural audit of a plan: stream sizes, level disjointness, sender and
/// reader visibility, and agreement between streams, split, and relay map.
pub fn validate_plan(p: &DycParams, plan: &LevelPlan) -> Result<(), String> {
    if plan.split != split_rates(plan.rates) {
        return Err("split does not match rates".into());
    }
    if plan.split.totals() != plan.rates {
        return Err("split components do not add up to rates".into());
    }
    let q = p.n1();
    let mut up_used = BTreeSet::new();
    let mut dn_used = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for s in &plan.streams {
        if s.up.len() != s.rate as usize || s.down.len() != s.rate as usize {
            return Err(format!("stream {} has wrong level count", s.id));
        }
        if !s.up.windows(2).all(|w| w[0] < w[1]) || !s.down.windows(2).all(|w| w[0] < w[1]) {
            return Err(format!("stream {} levels are not ascending", s.id));
        }
        for (&u, &d) in s.up.iter().zip(&s.down) {
            if u < 1 || u > q || d < 1 || d > q {
                return Err(format!("stream {} uses a level outside 1..={q}", s.id));
            }
            if !up_used.insert(u) {
                return Err(format!("uplink level {u} used twice"));
            }
            if !dn_used.insert(d) {
                return Err(format!("downlink level {d} used twice"));
            }
            pairs.insert((u, d));
            for user in s.kind.senders() {
                if u > p.n_of(user) {
                    return Err(format!(
                        "stream {}: sender {user} cannot reach uplink level {u}",
                        s.id
                    ));
                }
            }
            for user in s.kind.readers() {
                if d > p.n_of(user) {
                    return Err(format!(
                        "stream {}: reader {user} cannot see downlink level {d}",
                        s.id
                    ));
                }
            }
        }
    }
    let map_pairs: BTreeSet<(u32, u32)> = plan.relay_map.level_pairs().into_iter().collect();
    if map_pairs != pairs {
        return Err("relay map does not match stream levels".into());
    }
    Ok(())
}

/// Clears denominators: scales the profile and rates by the least common
/// multiple of the rate denominators, yielding an integer instance on a
/// proportionally deeper channel. The scale factor is returned alongside.
///
/// The expanded word length is capped at 64 bits to keep simulation
/// tractable; a tuple outside the outer bound is rejected up front since
/// scaling preserves membership.
pub fn expand_rational(
    p: &DycParams,
    rates: &RateTuple<Rat>,
) -> Result<(DycParams, [u32; 6], u32), PlanError> {
    if rates.0.iter().any(|r| r.is_negative()) {
        return Err(PlanError::NegativeRate);
    }
    let region = super::regions::outer_region(p);
    if let Some(row) = region.membership(rates, Rat::zero()).first_violation {
        return Err(PlanError::Infeasible(InfeasibleReason::OutsideOuterBound {
            row: region.ineqs[row].render(),
        }));
    }
    let mut factor: i64 = 1;
    for r in rates.0.iter() {
        factor = num::integer::lcm(factor, *r.denom());
    }
    let word_len = factor
        .checked_mul(p.n1() as i64)
        .ok_or(PlanError::ExpansionTooLarge { factor, word_len: i64::MAX })?;
    if word_len > 64 {
        return Err(PlanError::ExpansionTooLarge { factor, word_len });
    }
    let f = factor as u32;
    let scaled = DycParams::new(p.n1() * f, p.n2() * f, p.n3() * f).unwrap();
    let mut out = [0u32; 6];
    for (slot, r) in out.iter_mut().zip(rates.0.iter()) {
        let scaled_rate = r * Rat::from_integer(factor);
        debug_assert!(scaled_rate.is_integer());
        *slot = scaled_rate.to_integer() as u32;
    }
    Ok((scaled, out, f))
}

impl LevelPlan {
    /// Total message bits per channel use.
    pub fn total_bits(&self) -> usize {
        self.rates.iter().map(|r| *r as usize).sum()
    }

    pub fn to_json(&self) -> Value {
        let streams: Vec<Value> = self
            .streams
            .iter()
            .flat_map(|s| {
                let (kind, users) = match s.kind {
                    StreamKind::Bidir { a, b } => ("bidir", vec![a, b]),
                    StreamKind::Cyclic { order123: true, top } => {
                        (if top { "cyclic-123-top" } else { "cyclic-123-bot" }, vec![1, 2, 3])
                    }
                    StreamKind::Cyclic { order123: false, top } => {
                        (if top { "cyclic-132-top" } else { "cyclic-132-bot" }, vec![1, 3, 2])
                    }
                    StreamKind::Uni { src, dst } => ("uni", vec![src, dst]),
                };
                let fragments = contiguous_fragments(&s.up, &s.down);
                let many = fragments.len() > 1;
                fragments
                    .into_iter()
                    .enumerate()
                    .map(|(i, (up, down))| {
                        let id = if many { format!("{}#{}", s.id, i + 1) } else { s.id.clone() };
                        json!({
                            "id": id,
                            "kind": kind,
                            "users": users,
                            "rate": up.1 - up.0 + 1,
                            "uplink": [up.0, up.1],
                            "downlink": [down.0, down.1],
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        json!({
            "levels": self.params.levels(),
            "rates": self.rates,
            "split": {
                "bidir12": self.split.bidir[0],
                "bidir13": self.split.bidir[1],
                "bidir23": self.split.bidir[2],
                "cyc123": self.split.cyc123,
                "cyc132": self.split.cyc132,
                "uni": self.split.uni,
            },
            "streams": streams,
            "relay_map": self.relay_map.level_pairs(),
        })
    }
}

/// Splits aligned level lists into maximal runs where both advance by one.
fn contiguous_fragments(up: &[u32], down: &[u32]) -> Vec<((u32, u32), (u32, u32))> {
    let mut out = Vec::new();
    if up.is_empty() {
        return out;
    }
    let mut start = 0usize;
    for t in 1..=up.len() {
        let broken = t == up.len()
            || up[t] != up[t - 1] + 1
            || down[t] != down[t - 1] + 1;
        if broken {
            out.push(((up[start], up[t - 1]), (down[start], down[t - 1])));
            start = t;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyc::regions::outer_region;
    use num::Zero;

    #[test]
    fn split_of_reference_tuple() {
        let split = split_rates([0, 2, 2, 1, 0, 2]);
        assert_eq!(split.bidir, [0, 0, 1]);
        assert_eq!(split.cyc123, 0);
        assert_eq!(split.cyc132, 1);
        assert_eq!(split.uni, [0, 1, 1, 0, 0, 0]);
        assert_eq!(split.totals(), [0, 2, 2, 1, 0, 2]);
    }

    #[test]
    fn split_is_exhaustive_and_acyclic() {
        // Residual one-way rates must contain no opposing pair and no cycle.
        for r12 in 0..3u32 {
            for r23 in 0..3u32 {
                for r31 in 0..3u32 {
                    let split = split_rates([r12, 1, 2, r23, r31, 1]);
                    assert!(split.cyc123 == 0 || split.cyc132 == 0);
                    let u = split.uni;
                    for pair in [(0, 2), (1, 4), (3, 5)] {
                        assert!(u[pair.0] == 0 || u[pair.1] == 0);
                    }
                    let c123 = u[0].min(u[3]).min(u[4]);
                    let c132 = u[1].min(u[5]).min(u[2]);
                    assert_eq!(c123, 0);
                    assert_eq!(c132, 0);
                }
            }
        }
    }

    #[test]
    fn reduction_of_reference_profile() {
        let p = DycParams::new(5, 4, 3).unwrap();
        let split = split_rates([0, 2, 2, 1, 0, 2]);
        let reduced = reduce_params(&p, &split).unwrap();
        assert_eq!(reduced.after_bidir.levels(), [4, 3, 2]);
        assert_eq!(reduced.after_cyclic.levels(), [2, 1, 1]);
    }

    #[test]
    fn reduction_with_dominant_bidir() {
        let p = DycParams::new(4, 3, 2).unwrap();
        let split = split_rates([1, 1, 1, 1, 1, 1]);
        assert_eq!(split.bidir, [1, 1, 1]);
        let reduced = reduce_params(&p, &split).unwrap();
        assert_eq!(reduced.after_bidir.levels(), [1, 0, 0]);
        assert_eq!(reduced.after_cyclic.levels(), [1, 0, 0]);
    }

    #[test]
    fn planner_places_reference_tuple() {
        let p = DycParams::new(5, 4, 3).unwrap();
        let plan = build_plan(&p, [0, 2, 2, 1, 0, 2]).unwrap();
        validate_plan(&p, &plan).expect("plan audit");
        assert_eq!(plan.total_bits(), 7);
        let ids: Vec<&str> = plan.streams.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, vec!["b23", "c132-top", "c132-bot", "u21", "u13"]);
        let by_id = |id: &str| plan.streams.iter().find(|s| s.id == id).unwrap();
        assert_eq!(by_id("b23").up, vec![1]);
        assert_eq!(by_id("c132-bot").up, vec![2]);
        assert_eq!(by_id("c132-top").up, vec![4]);
        // One-way streams swap windows between the links: user 2 transmits
        // low and receives high, user 1 the other way around.
        assert_eq!(by_id("u21").up, vec![3]);
        assert_eq!(by_id("u21").down, vec![5]);
        assert_eq!(by_id("u13").up, vec![5]);
        assert_eq!(by_id("u13").down, vec![3]);
    }

    #[test]
    fn planner_rejects_tuples_outside_the_bound() {
        let p = DycParams::new(2, 2, 2).unwrap();
        let err = build_plan(&p, [2, 0, 0, 2, 2, 0]).unwrap_err();
        assert!(matches!(err, PlanError::Infeasible(_)));
        let p = DycParams::new(3, 2, 1).unwrap();
        // R13 and R23 are both one-way here; the second cannot reach user 3.
        let err = build_plan(&p, [0, 1, 0, 1, 0, 0]).unwrap_err();
        assert_eq!(
            err,
            PlanError::Infeasible(InfeasibleReason::DownlinkExceedsUser {
                user: 3,
                level: 2,
                capacity: 1,
            })
        );
    }

    #[test]
    fn feasibility_matches_membership_on_a_small_grid() {
        // Spot check ahead of the exhaustive sweep in the acceptance suite.
        let p = DycParams::new(3, 2, 1).unwrap();
        let region = outer_region(&p);
        for r12 in 0..=3u32 {
            for r21 in 0..=3u32 {
                for r13 in 0..=2u32 {
                    for r32 in 0..=2u32 {
                        let rates = [r12, r13, r21, 0, 1, r32];
                        let tuple = crate::rate::RateTuple::from_integers(
                            rates.map(|v| v as i64),
                        );
                        let inside = region.contains(&tuple, Rat::zero());
                        let planned = build_plan(&p, rates).is_ok();
                        assert_eq!(inside, planned, "rates {rates:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn planner_output_passes_audit_on_scattered_tuples() {
        let cases = [
            ([4u32, 3, 2], [1u32, 1, 1, 1, 1, 1]),
            ([4, 3, 2], [2, 0, 1, 1, 1, 0]),
            ([5, 5, 5], [2, 1, 2, 2, 1, 1]),
            ([6, 4, 2], [2, 1, 2, 1, 1, 1]),
            ([4, 3, 1], [3, 0, 1, 0, 1, 0]),
        ];
        for (n, rates) in cases {
            let p = DycParams::new(n[0], n[1], n[2]).unwrap();
            if let Ok(plan) = build_plan(&p, rates) {
                validate_plan(&p, &plan).unwrap_or_else(|e| panic!("{n:?} {rates:?}: {e}"));
            }
        }
    }

    #[test]
    fn one_way_streams_may_fragment() {
        // Here the pair block splits user 1's leftover window in two, so the
        // stream from user 1 to user 2 straddles the gap.
        let p = DycParams::new(4, 3, 1).unwrap();
        let plan = build_plan(&p, [3, 0, 1, 0, 1, 0]).unwrap();
        validate_plan(&p, &plan).expect("plan audit");
        let u12 = plan.streams.iter().find(|s| s.id == "u12").unwrap();
        assert_eq!(u12.up, vec![2, 4]);
        let frags = contiguous_fragments(&u12.up, &u12.down);
        assert_eq!(frags.len(), 2);
        let v = plan.to_json();
        let ids: Vec<String> = v["streams"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s["id"].as_str().unwrap().to_string())
            .collect();
        assert!(ids.contains(&"u12#1".to_string()) && ids.contains(&"u12#2".to_string()));
    }

    #[test]
    fn expansion_clears_denominators() {
        let p = DycParams::new(1, 1, 1).unwrap();
        let rates = crate::rate::parse_rate_tuple("1/2,0,1/2,0,0,0").unwrap();
        let (scaled, int_rates, factor) = expand_rational(&p, &rates).unwrap();
        assert_eq!(factor, 2);
        assert_eq!(scaled.levels(), [2, 2, 2]);
        assert_eq!(int_rates, [1, 0, 1, 0, 0, 0]);

        let p = DycParams::new(4, 3, 2).unwrap();
        let rates = crate::rate::parse_rate_tuple("3/2,0,0,3/2,0,0").unwrap();
        let (scaled, int_rates, factor) = expand_rational(&p, &rates).unwrap();
        assert_eq!(factor, 2);
        assert_eq!(scaled.levels(), [8, 6, 4]);
        assert_eq!(int_rates, [3, 0, 0, 3, 0, 0]);
        assert!(build_plan(&scaled, int_rates).is_ok());
    }

    #[test]
    fn expansion_guards() {
        // One cyclic bit needs two levels at user 1, more than this
        // channel has.
        let p = DycParams::new(1, 1, 1).unwrap();
        let rates = crate::rate::parse_rate_tuple("1,0,0,1,1,0").unwrap();
        assert!(matches!(
            expand_rational(&p, &rates),
            Err(PlanError::Infeasible(_))
        ));
        let rates = crate::rate::parse_rate_tuple("1/97,0,0,0,0,0").unwrap();
        assert!(matches!(
            expand_rational(&p, &rates),
            Err(PlanError::ExpansionTooLarge { factor: 97, .. })
        ));
        let rates = crate::rate::parse_rate_tuple("-1/2,0,0,0,0,0").unwrap();
        assert_eq!(expand_rational(&p, &rates), Err(PlanError::NegativeRate));
    }

    #[test]
    fn zero_rates_give_an_empty_plan() {
        let p = DycParams::new(3, 2, 1).unwrap();
        let plan = build_plan(&p, [0; 6]).unwrap();
        assert!(plan.streams.is_empty());
        assert!(plan.relay_map.level_pairs().is_empty());
        validate_plan(&p, &plan).unwrap();
    }
}

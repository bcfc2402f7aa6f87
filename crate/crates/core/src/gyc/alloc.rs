//! Closed-form transmit power allocation for the Gaussian scheme.
//!
//! Uplink, the three users superpose lattice codewords and the relay peels
//! them off by successive decoding. Streams exchanged by a pair (the
//! bidirectional and cyclic sub-messages) use aligned lattice codebooks:
//! both senders scale their codeword so it arrives at the relay with the
//! same power, and the relay decodes the lattice sum of the pair instead
//! of the individual codewords. One-way streams are ordinary point-to-point
//! codewords. The decode order is fixed: first everything aligned to the
//! weakest user (user 3), then the streams of user 2, then those of user 1,
//! where each group is peeled bidirectional, cyclic, one-way.
//!
//! Powers are set bottom-up so that every stream's rate constraint is met
//! with equality against the interference of all streams decoded after it.
//! Walking the decode order in reverse keeps a running factor `f`: it
//! equals one plus the total received power (in noise units) of the already
//! placed streams, so the next stream with rate `r` needs received power
//! `(2^{2r+1} - 1) f` if it is an aligned pair (the lattice sum costs half
//! a bit, hence the extra doubling) or `(2^{2r} - 1) f` if it is one-way.
//!
//! Downlink, the relay superposes one codeword per sub-message and every
//! user decodes its incoming streams successively, strongest user peeled
//! last. The same bottom-up construction applies, without the half-bit
//! penalty because no lattice sums are involved.

use super::config::ChannelConfig;
use super::subrates::{assign_subrates, classify_sector, SubRateError, SubRates};
use crate::rate::RateTuple;

/// Fraction of each user's transmit power spent on every uplink stream.
///
/// Names follow the sub-message they carry: `a32b` is the share user 3
/// spends on the bidirectional stream of pair {2,3}, `a31c` its share for
/// the cycle 1->2->3->1, `a32u` for the one-way stream to user 2. Streams
/// whose codewords appear in two aligned pairs are sent twice with
/// independent shares, tagged `_top` and `_bot` for the higher and lower
/// position in the relay's decode order.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct AlphaSet {
    // user 3
    pub a32b: f64,
    pub a31b: f64,
    pub a31c: f64,
    pub a32c: f64,
    pub a32u: f64,
    pub a31u: f64,
    // user 2
    pub a21b: f64,
    pub a23b: f64,
    pub a23c_top: f64,
    pub a23c_bot: f64,
    pub a21c: f64,
    pub a23u: f64,
    pub a21u: f64,
    // user 1
    pub a12b: f64,
    pub a13b: f64,
    pub a12c: f64,
    pub a13c_top: f64,
    pub a13c_bot: f64,
    pub a12u: f64,
    pub a13u: f64,
}

impl AlphaSet {
    /// Fraction of user 1's power budget in use.
    pub fn user1_power(&self) -> f64 {
        self.a12b + self.a13b + self.a12c + self.a13c_top + self.a13c_bot + self.a12u + self.a13u
    }

    /// Fraction of user 2's power budget in use.
    pub fn user2_power(&self) -> f64 {
        self.a21b + self.a23b + self.a23c_top + self.a23c_bot + self.a21c + self.a23u + self.a21u
    }

    /// Fraction of user 3's power budget in use.
    pub fn user3_power(&self) -> f64 {
        self.a32b + self.a31b + self.a31c + self.a32c + self.a32u + self.a31u
    }
}

/// Fraction of the relay's transmit power spent on every downlink stream.
///
/// `b21b` carries the bidirectional stream of pair {1,2} towards user 2
/// (user 1's copy rides the same codeword, removed by side information),
/// `b12c`/`b21c` the cyclic streams decoded at users 2 and 1 of their
/// respective cycles, and the `u` entries the one-way streams named by
/// their original direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct BetaSet {
    // decoded at user 1
    pub b31u: f64,
    pub b21u: f64,
    // decoded at user 2
    pub b21b: f64,
    pub b21c: f64,
    pub b12c: f64,
    pub b32u: f64,
    pub b12u: f64,
    // decoded at user 3
    pub b32b: f64,
    pub b31b: f64,
    pub b31c: f64,
    pub b32c: f64,
    pub b23u: f64,
    pub b13u: f64,
}

impl BetaSet {
    /// Fraction of the relay's power budget in use.
    pub fn total(&self) -> f64 {
        self.b31u
            + self.b21u
            + self.b21b
            + self.b21c
            + self.b12c
            + self.b32u
            + self.b12u
            + self.b32b
            + self.b31b
            + self.b31c
            + self.b32c
            + self.b23u
            + self.b13u
    }
}

/// Complete power allocation for one rate tuple on one channel.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PowerAllocation {
    /// Sector of the rate tuple, see [`classify_sector`].
    pub sector: u8,
    /// Sub-message rates the scheme carries.
    pub sub: SubRates,
    /// Uplink power shares per user.
    pub alpha: AlphaSet,
    /// Downlink power shares at the relay.
    pub beta: BetaSet,
}

impl PowerAllocation {
    /// Power budget fraction in use at the given user, 1 to 3.
    pub fn source_power(&self, role: u8) -> f64 {
        match role {
            1 => self.alpha.user1_power(),
            2 => self.alpha.user2_power(),
            3 => self.alpha.user3_power(),
            _ => panic!("user role out of range: {role}"),
        }
    }

    /// Power budget fraction in use at the relay.
    pub fn relay_power(&self) -> f64 {
        self.beta.total()
    }
}

/// Power allocation failure.
#[derive(Clone, Debug, PartialEq)]
pub enum AllocError {
    /// The requested rates are negative or not finite.
    Rate(SubRateError),
    /// A user with zero received SNR has a positive rate to carry.
    ZeroGain { role: u8 },
    /// The rates are so large that the power bookkeeping overflows `f64`.
    /// Such a tuple is far outside any power constraint anyway.
    Overflow,
}

impl std::fmt::Display for AllocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AllocError::Rate(e) => write!(f, "{e}"),
            AllocError::ZeroGain { role } => {
                write!(f, "user {role} has zero received SNR but a positive rate to carry")
            }
            AllocError::Overflow => write!(f, "rates overflow the power bookkeeping"),
        }
    }
}

impl std::error::Error for AllocError {}

impl From<SubRateError> for AllocError {
    fn from(e: SubRateError) -> Self {
        AllocError::Rate(e)
    }
}

/// One uplink decode step at the relay. `B` slots are bidirectional pairs,
/// `C` slots cyclic pairs, `U` slots one-way streams; the digits name the
/// sub-message whose power share the slot fixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    B32,
    B31,
    C31,
    C32,
    U32,
    U31,
    B21,
    C23,
    C21,
    U23,
    U21,
    U13,
    U12,
}

/// Relay decode order, last decoded first. Power assignment walks this
/// list forwards, so every slot sees exactly the later-decoded streams
/// as interference.
const DECODE_ORDER: [Slot; 13] = [
    Slot::B32,
    Slot::B31,
    Slot::C31,
    Slot::C32,
    Slot::U32,
    Slot::U31,
    Slot::B21,
    Slot::C23,
    Slot::C21,
    Slot::U23,
    Slot::U21,
    Slot::U13,
    Slot::U12,
];

impl Slot {
    /// The slots a sector can need. Slots absent from a sector's list
    /// carry rate zero there identically, so they are skipped without
    /// reserving decode-order room.
    fn active_in(self, sector: u8) -> bool {
        use Slot::*;
        let table: &[Slot] = match sector {
            1 => &[B32, B31, B21, U23, U13, U12],
            2 => &[B32, B31, U32, B21, U13, U12],
            3 => &[B32, B31, C31, U31, B21, C23, U23, U12],
            4 => &[B32, B31, U32, U31, B21, U12],
            5 => &[B32, B31, B21, U23, U21, U13],
            6 => &[B32, B31, C32, U32, B21, C21, U21, U13],
            7 => &[B32, B31, U31, B21, U23, U21],
            8 => &[B32, B31, U32, U31, B21, U21],
            _ => panic!("sector out of range: {sector}"),
        };
        table.contains(&self)
    }

    /// Rate the slot carries under a given sub-rate split.
    fn rate(self, sub: &SubRates) -> f64 {
        use Slot::*;
        match self {
            B21 => sub.bidir[0],
            B31 => sub.bidir[1],
            B32 => sub.bidir[2],
            C31 | C23 => sub.cyc123,
            C32 | C21 => sub.cyc132,
            U12 => sub.uni[0],
            U13 => sub.uni[1],
            U21 => sub.uni[2],
            U23 => sub.uni[3],
            U31 => sub.uni[4],
            U32 => sub.uni[5],
        }
    }

    /// User whose power share the slot fixes.
    fn owner(self) -> u8 {
        use Slot::*;
        match self {
            B32 | B31 | C31 | C32 | U32 | U31 => 3,
            B21 | C23 | C21 | U23 | U21 => 2,
            U13 | U12 => 1,
        }
    }

    /// Aligned pairs cost an extra half bit for the lattice sum.
    fn paired(self) -> bool {
        use Slot::*;
        !matches!(self, U32 | U31 | U23 | U21 | U13 | U12)
    }
}

/// Computes the uplink and downlink power shares that carry `rates` over
/// the channel, rates given in role order (strongest user first).
///
/// Every returned share makes its stream's rate constraint tight against
/// the interference the decode orders leave in place, so the allocation is
/// the cheapest one for this layering. Nothing here checks that the shares
/// respect the unit power budgets; that is the job of the caller, because
/// an over-budget allocation is exactly how infeasibility of a tuple shows
/// up.
pub fn allocate_powers(
    cfg: &ChannelConfig,
    rates: &RateTuple<f64>,
) -> Result<PowerAllocation, AllocError> {
    let sub = assign_subrates(rates)?;
    let sector = classify_sector(rates);
    let alpha = uplink_shares(cfg, &sub, sector)?;
    let beta = downlink_shares(cfg, &sub)?;
    Ok(PowerAllocation { sector, sub, alpha, beta })
}

fn uplink_shares(cfg: &ChannelConfig, sub: &SubRates, sector: u8) -> Result<AlphaSet, AllocError> {
    let snr = [cfg.snr(1), cfg.snr(2), cfg.snr(3)];
    let mut share = [0.0f64; 13];
    let mut f = 1.0f64;
    for (k, slot) in DECODE_ORDER.iter().enumerate() {
        if !slot.active_in(sector) {
            continue;
        }
        let r = slot.rate(sub);
        let h = snr[slot.owner() as usize - 1];
        if slot.paired() {
            if r > 0.0 {
                if h <= 0.0 {
                    return Err(AllocError::ZeroGain { role: slot.owner() });
                }
                share[k] = (f64::exp2(2.0 * r + 1.0) - 1.0) * f / (2.0 * h);
            }
            // A zero-rate pair still reserves its half-bit headroom. The
            // budget analysis accounts for it, so keeping the factor is
            // free, and it keeps every share at its closed form.
            f *= f64::exp2(2.0 * r + 1.0);
        } else {
            if r > 0.0 {
                if h <= 0.0 {
                    return Err(AllocError::ZeroGain { role: slot.owner() });
                }
                share[k] = (f64::exp2(2.0 * r) - 1.0) * f / h;
            }
            f *= f64::exp2(2.0 * r);
        }
    }
    if !f.is_finite() {
        return Err(AllocError::Overflow);
    }

    let mut a = AlphaSet::default();
    for (k, slot) in DECODE_ORDER.iter().enumerate() {
        let v = share[k];
        match slot {
            Slot::B32 => a.a32b = v,
            Slot::B31 => a.a31b = v,
            Slot::C31 => a.a31c = v,
            Slot::C32 => a.a32c = v,
            Slot::U32 => a.a32u = v,
            Slot::U31 => a.a31u = v,
            Slot::B21 => a.a21b = v,
            Slot::C23 => a.a23c_top = v,
            Slot::C21 => a.a21c = v,
            Slot::U23 => a.a23u = v,
            Slot::U21 => a.a21u = v,
            Slot::U13 => a.a13u = v,
            Slot::U12 => a.a12u = v,
        }
    }
    // The partner of an aligned pair scales its share so both codewords
    // arrive at the relay with equal power.
    a.a23b = linked(a.a32b, snr[2], snr[1]);
    a.a13b = linked(a.a31b, snr[2], snr[0]);
    a.a23c_bot = linked(a.a31c, snr[2], snr[1]);
    a.a13c_bot = linked(a.a32c, snr[2], snr[0]);
    a.a12b = linked(a.a21b, snr[1], snr[0]);
    a.a12c = linked(a.a23c_top, snr[1], snr[0]);
    a.a13c_top = linked(a.a21c, snr[1], snr[0]);
    Ok(a)
}

/// Partner share of an aligned pair: received powers match when the
/// shares are in inverse proportion to the SNRs.
fn linked(primary: f64, h_low: f64, h_high: f64) -> f64 {
    if primary == 0.0 {
        0.0
    } else {
        primary * h_low / h_high
    }
}

fn downlink_shares(cfg: &ChannelConfig, sub: &SubRates) -> Result<BetaSet, AllocError> {
    let mut b = BetaSet::default();
    let mut placed = 0.0f64;

    // Streams decoded at each user, last decoded first within the group.
    // User 1 is peeled last overall, so its group sees no interference
    // beyond the relay noise floor.
    {
        let h = cfg.snr(1);
        let rates = [sub.uni[4], sub.uni[2]];
        let mut out = [0.0f64; 2];
        group_shares(h, &rates, &mut out, &mut placed, 1)?;
        b.b31u = out[0];
        b.b21u = out[1];
    }
    {
        let h = cfg.snr(2);
        let rates = [sub.bidir[0], sub.cyc132, sub.cyc123, sub.uni[5], sub.uni[0]];
        let mut out = [0.0f64; 5];
        group_shares(h, &rates, &mut out, &mut placed, 2)?;
        b.b21b = out[0];
        b.b21c = out[1];
        b.b12c = out[2];
        b.b32u = out[3];
        b.b12u = out[4];
    }
    {
        let h = cfg.snr(3);
        let rates = [
            sub.bidir[2],
            sub.bidir[1],
            sub.cyc123,
            sub.cyc132,
            sub.uni[3],
            sub.uni[1],
        ];
        let mut out = [0.0f64; 6];
        group_shares(h, &rates, &mut out, &mut placed, 3)?;
        b.b32b = out[0];
        b.b31b = out[1];
        b.b31c = out[2];
        b.b32c = out[3];
        b.b23u = out[4];
        b.b13u = out[5];
    }
    Ok(b)
}

/// Fills the downlink shares of one user's decode group. `placed` carries
/// the total share already granted to groups of stronger users, which this
/// user cannot cancel and sees as interference.
fn group_shares(
    h: f64,
    rates: &[f64],
    out: &mut [f64],
    placed: &mut f64,
    role: u8,
) -> Result<(), AllocError> {
    let mut cum = 1.0 + *placed * h;
    for (i, &r) in rates.iter().enumerate() {
        if r > 0.0 {
            if h <= 0.0 {
                return Err(AllocError::ZeroGain { role });
            }
            out[i] = (f64::exp2(2.0 * r) - 1.0) * cum / h;
            *placed += out[i];
        }
        cum *= f64::exp2(2.0 * r);
    }
    if !cum.is_finite() {
        return Err(AllocError::Overflow);
    }
    Ok(())
}

/// Total downlink share the relay needs, in closed form: the per-user
/// incoming rate sums `e1, e2, e3` determine it independently of how the
/// rates split across streams.
pub fn relay_share_closed_form(cfg: &ChannelConfig, sub: &SubRates) -> f64 {
    let e1 = sub.uni[2] + sub.uni[4];
    let e2 = sub.bidir[0] + sub.cyc123 + sub.cyc132 + sub.uni[0] + sub.uni[5];
    let e3 = sub.bidir[1] + sub.bidir[2] + sub.cyc123 + sub.cyc132 + sub.uni[1] + sub.uni[3];
    let x = f64::exp2(2.0 * e1);
    let y = f64::exp2(2.0 * e2);
    let z = f64::exp2(2.0 * e3);
    let mut total = 0.0;
    if e3 > 0.0 {
        total += (z - 1.0) / cfg.snr(3);
    }
    if e2 > 0.0 {
        total += (y - 1.0) * z / cfg.snr(2);
    }
    if e1 > 0.0 {
        total += (x - 1.0) * y * z / cfg.snr(1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(snrs: [f64; 3]) -> ChannelConfig {
        ChannelConfig::from_snrs(snrs, 1.0).unwrap()
    }

    fn tuple(v: [f64; 6]) -> RateTuple<f64> {
        RateTuple::new(v)
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn lone_one_way_rate_keeps_pair_headroom() {
        // Sector 1 with only R12 = 1. The three bidirectional pair slots
        // stay active at rate zero and each doubles the running factor,
        // so the share is (2^2 - 1) * 2^3 / 100.
        let p = allocate_powers(&cfg([100.0, 10.0, 1.0]), &tuple([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
            .unwrap();
        assert_eq!(p.sector, 1);
        close(p.alpha.a12u, 0.24);
        assert_eq!(p.alpha.a32b, 0.0);
        assert_eq!(p.alpha.a21b, 0.0);
        close(p.alpha.user1_power(), 0.24);
        assert_eq!(p.alpha.user2_power(), 0.0);
        assert_eq!(p.alpha.user3_power(), 0.0);
    }

    #[test]
    fn pure_cycle_shares() {
        // Sector 3 carrying one cyclic bit: R12 = R23 = R31 = 1. With
        // received SNRs (1600, 400, 100) the cycle's lower pair costs
        // user 3 a share of 7 * 4 / 200 and the upper pair costs user 2
        // 7 * 64 / 800.
        let p = allocate_powers(
            &cfg([1600.0, 400.0, 100.0]),
            &tuple([1.0, 0.0, 0.0, 1.0, 1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(p.sector, 3);
        assert_eq!(p.sub.cyc123, 1.0);
        close(p.alpha.a31c, 0.14);
        close(p.alpha.a23c_top, 0.56);
        // Pair partners arrive with matching power.
        close(p.alpha.a23c_bot * 400.0, p.alpha.a31c * 100.0);
        close(p.alpha.a12c * 1600.0, p.alpha.a23c_top * 400.0);
        assert_eq!(p.alpha.a32c, 0.0);
        assert_eq!(p.alpha.a21c, 0.0);
    }

    #[test]
    fn bidirectional_share_matches_closed_form() {
        // Sector 1, only pair {2,3} active with one bit each way.
        let p = allocate_powers(&cfg([64.0, 32.0, 16.0]), &tuple([0.0, 0.0, 0.0, 1.0, 0.0, 1.0]))
            .unwrap();
        close(p.alpha.a32b, (f64::exp2(3.0) - 1.0) / (2.0 * 16.0));
        close(p.alpha.a23b * 32.0, p.alpha.a32b * 16.0);
        // The remaining pair slots double the factor twice; the one-way
        // slot for the surplus carries rate zero, so nothing else spends
        // power.
        assert_eq!(p.alpha.user1_power(), 0.0);
        close(p.alpha.user3_power(), p.alpha.a32b);
    }

    #[test]
    fn downlink_single_streams() {
        let c = cfg([100.0, 50.0, 10.0]);
        // Only R12 = 1: decoded at user 2, nothing above it in the order.
        let p = allocate_powers(&c, &tuple([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        close(p.beta.b12u, 3.0 / 50.0);
        close(p.relay_power(), 3.0 / 50.0);
        // Only R13 = 1: decoded at user 3.
        let p = allocate_powers(&c, &tuple([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        close(p.beta.b13u, 3.0 / 10.0);
        // Only R31 = 1: decoded at user 1.
        let p = allocate_powers(&c, &tuple([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
        close(p.beta.b31u, 3.0 / 100.0);
    }

    #[test]
    fn downlink_layering_orders_interference() {
        let c = cfg([100.0, 50.0, 10.0]);
        let p = allocate_powers(&c, &tuple([1.0, 0.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        // Pair {1,2} exchanges one bit each way over a single relay
        // codeword, decoded under the user-1 one-way load.
        close(p.beta.b21b, 3.0 / 50.0);
        assert_eq!(p.beta.b21u, 0.0);
        let p = allocate_powers(&c, &tuple([0.0, 0.0, 1.0, 0.0, 1.0, 0.0])).unwrap();
        // User 1 decodes R21 before R31: the R21 codeword sees the R31
        // codeword as interference, costing a factor 2^{2 R31}.
        close(p.beta.b31u, 3.0 / 100.0);
        close(p.beta.b21u, 3.0 * 4.0 / 100.0);
    }

    #[test]
    fn relay_share_matches_closed_form() {
        let c = cfg([1600.0, 400.0, 100.0]);
        let cases = [
            [0.5, 0.25, 1.0, 0.75, 0.5, 0.25],
            [1.0, 0.0, 0.0, 1.0, 1.0, 0.0],
            [0.0, 2.0, 2.0, 1.0, 0.0, 2.0],
            [0.0; 6],
            [0.3, 0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        for r in cases {
            let p = allocate_powers(&c, &tuple(r)).unwrap();
            close(p.relay_power(), relay_share_closed_form(&c, &p.sub));
        }
    }

    #[test]
    fn zero_gain_rejects_positive_rate() {
        let c = cfg([100.0, 50.0, 0.0]);
        let err = allocate_powers(&c, &tuple([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(err, AllocError::ZeroGain { role: 3 });
        // With every rate touching user 3 at zero the allocation goes
        // through.
        let p = allocate_powers(&c, &tuple([1.0, 0.0, 2.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(p.alpha.user3_power() == 0.0);
        assert!(p.relay_power().is_finite());
    }

    #[test]
    fn huge_rates_overflow_honestly() {
        let c = cfg([100.0, 50.0, 10.0]);
        let err = allocate_powers(&c, &tuple([600.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(err, AllocError::Overflow);
        // Rates that merely exceed the budget by astronomical amounts
        // still come back as a finite, failing allocation.
        let p = allocate_powers(&c, &tuple([400.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(p.alpha.a12u.is_finite() && p.alpha.a12u > 1.0);
    }

    #[test]
    fn negative_rate_is_rejected() {
        let c = cfg([100.0, 50.0, 10.0]);
        let err = allocate_powers(&c, &tuple([0.0, 0.0, -0.5, 0.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(err, AllocError::Rate(SubRateError::Negative { index: 2 }));
    }
}

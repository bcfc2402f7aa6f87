//! Outer bound, inner target, and the constant-gap check for the Gaussian
//! channel.
//!
//! With `H_j = h_j^2 * P` the received SNRs in role order and
//! `X = (|h2| + |h3|)^2 * P` the coherent-combining SNR of the two weaker
//! users, the outer bound consists of two-rate cuts through each user and
//! six three-rate side-information bounds. The inner target shifts a subset
//! of those rows in by a fixed deficit (2, 3, or 7/2 bits); the power
//! allocation in [`super::alloc`] achieves every non-negative tuple in it.
//! Since no row involves more than three rates and no deficit exceeds the
//! number of rates in its row times 7/6, moving any outer-bound tuple down
//! by 7/6 bit per component lands inside the target, at every SNR.

use crate::rate::RateTuple;
use crate::region::{Inequality, LinearRegion};

use super::config::ChannelConfig;

/// Per-rate gap, in bits, between the outer bound and the inner target.
pub const GAP_BITS: f64 = 7.0 / 6.0;

/// Gaussian point-to-point capacity `log2(1 + x) / 2`.
///
/// Panics on a negative argument; use [`cap_plus`] for shifted quantities
/// that may dip below zero.
pub fn cap(x: f64) -> f64 {
    assert!(x >= 0.0, "cap of negative snr {x}");
    0.5 * (1.0 + x).log2()
}

/// `cap` clamped below: `cap(max(x, 0))`, always non-negative.
pub fn cap_plus(x: f64) -> f64 {
    cap(x.max(0.0))
}

/// The fourteen-row outer bound.
///
/// The two-rate bounds with two right-hand sides (through user 1 both
/// directions) are expanded into separate rows, one per side of the min.
pub fn outer_region(cfg: &ChannelConfig) -> LinearRegion<f64> {
    let [hh1, hh2, hh3] = cfg.snrs();
    let x = cfg.coherent_snr_23();
    LinearRegion::new(vec![
        Inequality::new([0, 0, 0, 0, 1, 1], cap(hh3), "cut-2rate-r31+r32"),
        Inequality::new([0, 1, 0, 1, 0, 0], cap(hh3), "cut-2rate-r13+r23"),
        Inequality::new([0, 0, 1, 1, 0, 0], cap(hh2), "cut-2rate-r21+r23"),
        Inequality::new([1, 0, 0, 0, 0, 1], cap(hh2), "cut-2rate-r12+r32"),
        Inequality::new([1, 1, 0, 0, 0, 0], cap(hh1), "cut-2rate-r12+r13-direct"),
        Inequality::new([1, 1, 0, 0, 0, 0], cap(hh2 + hh3), "cut-2rate-r12+r13-mac"),
        Inequality::new([0, 0, 1, 0, 1, 0], cap(hh1), "cut-2rate-r21+r31-direct"),
        Inequality::new([0, 0, 1, 0, 1, 0], cap(x), "cut-2rate-r21+r31-bc"),
        Inequality::new([1, 1, 0, 0, 0, 1], cap(hh2 + hh3), "genie-3rate-r12+r13+r32"),
        Inequality::new([1, 1, 0, 1, 0, 0], cap(hh2 + hh3), "genie-3rate-r12+r13+r23"),
        Inequality::new([0, 1, 1, 1, 0, 0], cap(hh1 + hh3), "genie-3rate-r21+r23+r13"),
        Inequality::new([0, 0, 1, 1, 1, 0], cap(x), "genie-3rate-r21+r23+r31"),
        Inequality::new([1, 0, 0, 0, 1, 1], cap(hh1 + hh2), "genie-3rate-r31+r32+r12"),
        Inequality::new([0, 0, 1, 0, 1, 1], cap(x), "genie-3rate-r31+r32+r21"),
    ])
}

/// The eight-row inner target achieved by the closed-form allocation.
///
/// Right-hand sides may be negative at low SNR; only the non-negative part
/// of the region is meaningful for actual rates.
pub fn inner_target_region(cfg: &ChannelConfig) -> LinearRegion<f64> {
    let [hh1, hh2, hh3] = cfg.snrs();
    let x = cfg.coherent_snr_23();
    LinearRegion::new(vec![
        Inequality::new([0, 0, 0, 0, 1, 1], cap(hh3) - 2.0, "ach-2rate-r31+r32"),
        Inequality::new([0, 1, 0, 1, 0, 0], cap(hh3) - 2.0, "ach-2rate-r13+r23"),
        Inequality::new([1, 1, 0, 0, 0, 1], cap(hh2 + hh3) - 3.0, "ach-3rate-r12+r13+r32"),
        Inequality::new([1, 1, 0, 1, 0, 0], cap(hh2 + hh3) - 3.0, "ach-3rate-r12+r13+r23"),
        Inequality::new([1, 0, 0, 0, 1, 1], cap(hh1 + hh2) - 3.0, "ach-3rate-r31+r32+r12"),
        Inequality::new([0, 1, 1, 1, 0, 0], cap(hh1 + hh3) - 3.0, "ach-3rate-r21+r23+r13"),
        Inequality::new([0, 0, 1, 1, 1, 0], cap(x) - 3.5, "ach-3rate-r21+r23+r31"),
        Inequality::new([0, 0, 1, 0, 1, 1], cap(x) - 3.5, "ach-3rate-r31+r32+r21"),
    ])
}

/// Constant-gap certificate for one tuple.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub in_outer: bool,
    /// The tuple moved down by [`GAP_BITS`] in every component, unclipped.
    pub shifted: RateTuple<f64>,
    /// The shifted tuple clipped at zero, the point actually transmitted.
    pub achievable: RateTuple<f64>,
    /// Slack of the unclipped shifted tuple against each inner-target row.
    pub inner_slacks: Vec<f64>,
    pub min_inner_slack: f64,
    /// True unless the tuple is in the outer bound yet its shift misses the
    /// inner target, which would break the constant-gap claim.
    pub pass: bool,
}

/// Checks that shifting `r` down by 7/6 bit per rate lands in the inner
/// target whenever `r` lies in the outer bound. `tol` absorbs floating
/// point noise on both membership tests.
pub fn check_gap(cfg: &ChannelConfig, r: &RateTuple<f64>, tol: f64) -> GapReport {
    let outer = outer_region(cfg);
    let inner = inner_target_region(cfg);
    let in_outer = outer.contains(r, tol);
    let shifted = r.map(|v| v - GAP_BITS);
    let achievable = shifted.map(|v| v.max(0.0));
    let m = inner.membership(&shifted, tol);
    let min_inner_slack = m.min_row.map(|i| m.slacks[i]).unwrap_or(f64::INFINITY);
    let pass = !in_outer || m.inside;
    GapReport { in_outer, shifted, achievable, inner_slacks: m.slacks, min_inner_slack, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn capacity_function_values() {
        close(cap(0.0), 0.0);
        close(cap(3.0), 1.0);
        close(cap(15.0), 2.0);
        close(cap(63.0), 3.0);
        close(cap(18.0), 2.1239637567217927);
        assert_eq!(cap_plus(-5.0), 0.0);
        close(cap_plus(3.0), 1.0);
    }

    #[test]
    #[should_panic]
    fn capacity_rejects_negative_snr() {
        cap(-0.5);
    }

    #[test]
    fn outer_rows_for_reference_snrs() {
        // Gains chosen so the received SNRs are (63, 15, 3) at P = 1.
        let cfg = ChannelConfig::from_snrs([63.0, 15.0, 3.0], 1.0).unwrap();
        let region = outer_region(&cfg);
        assert_eq!(region.ineqs.len(), 14);
        let rhs: Vec<f64> = region.ineqs.iter().map(|q| q.rhs).collect();
        let cx = 2.5093261631601786;
        close(rhs[0], 1.0);
        close(rhs[1], 1.0);
        close(rhs[2], 2.0);
        close(rhs[3], 2.0);
        close(rhs[4], 3.0);
        close(rhs[5], 2.1239637567217927);
        close(rhs[6], 3.0);
        close(rhs[7], cx);
        close(rhs[8], 2.1239637567217927);
        close(rhs[9], 2.1239637567217927);
        close(rhs[10], 3.0330445952288862);
        close(rhs[11], cx);
        close(rhs[12], 3.1518903740885515);
        close(rhs[13], cx);
    }

    #[test]
    fn inner_rows_for_high_snr() {
        let cfg =
            ChannelConfig::from_snrs([(1u64 << 20) as f64 - 1.0, (1 << 16) as f64 - 1.0,
                (1 << 12) as f64 - 1.0], 1.0)
            .unwrap();
        let region = inner_target_region(&cfg);
        assert_eq!(region.ineqs.len(), 8);
        let rhs: Vec<f64> = region.ineqs.iter().map(|q| q.rhs).collect();
        close(rhs[0], 4.0);
        close(rhs[1], 4.0);
        close(rhs[2], 5.0437210611252242);
        close(rhs[3], 5.0437210611252242);
        close(rhs[4], 7.0437307731607818);
        close(rhs[5], 7.0028115893427829);
        close(rhs[6], 4.8218911092781942);
        close(rhs[7], 4.8218911092781942);
    }

    #[test]
    fn every_inner_row_shadows_an_outer_row_within_the_gap() {
        // Structural form of the constant-gap argument: each inner row has
        // an outer row over the same rates whose rhs exceeds it by at most
        // (number of rates) * 7/6.
        let cfg = ChannelConfig::new([2.5, 0.7, 0.3], 11.0).unwrap();
        let outer = outer_region(&cfg);
        let inner = inner_target_region(&cfg);
        for row in &inner.ineqs {
            let matched = outer.ineqs.iter().any(|o| {
                o.coeffs == row.coeffs
                    && o.rhs - row.rhs <= row.term_count() as f64 * GAP_BITS + 1e-12
            });
            assert!(matched, "row {} lacks a shadowing outer row", row.tag);
        }
    }

    #[test]
    fn gap_check_on_outer_boundary_points() {
        let cfg = ChannelConfig::from_snrs([63.0, 15.0, 3.0], 1.0).unwrap();
        // A point saturating the R13 + R23 cut.
        let r = RateTuple::new([0.0, 0.5, 0.0, 0.5, 0.0, 0.0]);
        let report = check_gap(&cfg, &r, 1e-9);
        assert!(report.in_outer);
        assert!(report.pass);
        assert!(report.min_inner_slack >= -1e-9);
        close(report.shifted.0[1], 0.5 - GAP_BITS);
        assert_eq!(report.achievable.0[1], 0.0);
    }

    #[test]
    fn gap_check_is_vacuous_outside_the_outer_bound() {
        let cfg = ChannelConfig::from_snrs([63.0, 15.0, 3.0], 1.0).unwrap();
        let r = RateTuple::new([10.0; 6]);
        let report = check_gap(&cfg, &r, 1e-9);
        assert!(!report.in_outer);
        assert!(report.pass);
    }

    #[test]
    fn zero_power_collapses_the_outer_bound_to_zero() {
        let cfg = ChannelConfig::new([1.0, 0.5, 0.2], 0.0).unwrap();
        let region = outer_region(&cfg);
        for q in &region.ineqs {
            assert_eq!(q.rhs, 0.0);
        }
        assert!(region.contains(&RateTuple::new([0.0; 6]), 0.0));
    }
}

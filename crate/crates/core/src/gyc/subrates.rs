//! Splitting a Gaussian rate tuple into sub-message rates.
//!
//! The achievable scheme serves a rate tuple with three strategies layered
//! on top of each other: bidirectional exchange within each user pair,
//! cyclic exchange around one of the two directed three-cycles, and plain
//! one-way relaying for whatever remains. This module decides how much of
//! each requested rate every strategy carries. The arithmetic mirrors the
//! integer split used by the deterministic planner, evaluated in `f64`.

use crate::rate::{dir_index, RateTuple};

/// Rates of the sub-messages each strategy carries, in bits per dimension.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SubRates {
    /// Rate exchanged in each direction of a pair, indexed {1,2}, {1,3}, {2,3}.
    pub bidir: [f64; 3],
    /// Rate carried around the cycle 1 -> 2 -> 3 -> 1.
    pub cyc123: f64,
    /// Rate carried around the cycle 1 -> 3 -> 2 -> 1.
    pub cyc132: f64,
    /// Leftover one-way rate per direction, in rate tuple order.
    pub uni: [f64; 6],
}

impl SubRates {
    /// Total rate the sub-messages deliver in direction `src -> dst`.
    /// Equals the requested rate by construction.
    pub fn total(&self, src: u8, dst: u8) -> f64 {
        let d = dir_index(src, dst);
        let pair = match (src.min(dst), src.max(dst)) {
            (1, 2) => 0,
            (1, 3) => 1,
            _ => 2,
        };
        let cyc = match d {
            0 | 3 | 4 => self.cyc123,
            _ => self.cyc132,
        };
        self.bidir[pair] + cyc + self.uni[d]
    }
}

/// A rate that cannot be split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubRateError {
    Negative { index: usize },
    NonFinite { index: usize },
}

impl std::fmt::Display for SubRateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SubRateError::Negative { index } => {
                write!(f, "rate component {index} is negative")
            }
            SubRateError::NonFinite { index } => {
                write!(f, "rate component {index} is not a finite number")
            }
        }
    }
}

impl std::error::Error for SubRateError {}

/// Orders the rate tuple into one of eight sectors by comparing the two
/// directions of each pair. Sector numbers follow a binary code: starting
/// from 1, add 4 if `R12 < R21`, add 2 if `R13 < R31`, and add 1 if
/// `R23 < R32`. Ties count as "not less", so a symmetric tuple lands in
/// sector 1. Sectors 3 and 6 are the ones where cyclic exchange can carry
/// a positive rate.
pub fn classify_sector(r: &RateTuple<f64>) -> u8 {
    let mut s = 1;
    if r.get(1, 2) < r.get(2, 1) {
        s += 4;
    }
    if r.get(1, 3) < r.get(3, 1) {
        s += 2;
    }
    if r.get(2, 3) < r.get(3, 2) {
        s += 1;
    }
    s
}

/// Splits a tuple of requested rates into per-strategy sub-rates.
///
/// Bidirectional exchange takes the pairwise minimum of the two opposite
/// directions. On the residual one-way demands, at most one of the two
/// cycles can have all three of its directions positive; that cycle
/// carries their minimum. The rest moves one-way. The three parts sum
/// back to the input exactly in each direction.
pub fn assign_subrates(r: &RateTuple<f64>) -> Result<SubRates, SubRateError> {
    for (i, v) in r.components().iter().enumerate() {
        if !v.is_finite() {
            return Err(SubRateError::NonFinite { index: i });
        }
        if *v < 0.0 {
            return Err(SubRateError::Negative { index: i });
        }
    }
    let b12 = r.get(1, 2).min(r.get(2, 1));
    let b13 = r.get(1, 3).min(r.get(3, 1));
    let b23 = r.get(2, 3).min(r.get(3, 2));
    let d12 = r.get(1, 2) - b12;
    let d21 = r.get(2, 1) - b12;
    let d13 = r.get(1, 3) - b13;
    let d31 = r.get(3, 1) - b13;
    let d23 = r.get(2, 3) - b23;
    let d32 = r.get(3, 2) - b23;
    let cyc123 = d12.min(d23).min(d31);
    let cyc132 = d13.min(d32).min(d21);
    let uni = [
        d12 - cyc123,
        d13 - cyc132,
        d21 - cyc132,
        d23 - cyc123,
        d31 - cyc123,
        d32 - cyc132,
    ];
    Ok(SubRates { bidir: [b12, b13, b23], cyc123, cyc132, uni })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(v: [f64; 6]) -> RateTuple<f64> {
        RateTuple::new(v)
    }

    #[test]
    fn sector_codes() {
        assert_eq!(classify_sector(&tuple([0.0; 6])), 1);
        assert_eq!(classify_sector(&tuple([3.0, 1.0, 2.0, 2.0, 1.0, 1.0])), 1);
        assert_eq!(classify_sector(&tuple([0.0, 2.0, 2.0, 1.0, 0.0, 2.0])), 6);
        assert_eq!(classify_sector(&tuple([1.0, 0.0, 0.0, 1.0, 1.0, 0.0])), 3);
        assert_eq!(classify_sector(&tuple([0.0, 0.0, 1.0, 0.0, 1.0, 1.0])), 8);
        assert_eq!(classify_sector(&tuple([1.0, 1.0, 1.0, 1.0, 1.0, 1.0])), 1);
    }

    #[test]
    fn split_puts_cycle_on_residual() {
        let s = assign_subrates(&tuple([0.0, 2.0, 2.0, 1.0, 0.0, 2.0])).unwrap();
        assert_eq!(s.bidir, [0.0, 0.0, 1.0]);
        assert_eq!(s.cyc123, 0.0);
        assert_eq!(s.cyc132, 1.0);
        assert_eq!(s.uni, [0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn split_handles_fractional_rates() {
        let s = assign_subrates(&tuple([1.5, 0.25, 0.5, 2.0, 1.25, 0.75])).unwrap();
        assert_eq!(s.bidir, [0.5, 0.25, 0.75]);
        // Residuals: d12 = 1, d23 = 1.25, d31 = 1, d13 = d21 = d32 = 0.
        assert_eq!(s.cyc123, 1.0);
        assert_eq!(s.cyc132, 0.0);
        assert_eq!(s.uni, [0.0, 0.0, 0.0, 0.25, 0.0, 0.0]);
    }

    #[test]
    fn at_most_one_cycle_is_positive() {
        let cases = [
            [1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            [6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
            [2.0, 2.0, 2.0, 2.0, 2.0, 2.0],
            [0.1, 0.9, 0.4, 0.6, 1.3, 0.2],
        ];
        for c in cases {
            let s = assign_subrates(&tuple(c)).unwrap();
            assert!(
                s.cyc123 == 0.0 || s.cyc132 == 0.0,
                "both cycles positive for {c:?}"
            );
        }
    }

    #[test]
    fn parts_sum_back_to_the_request() {
        let r = tuple([1.5, 0.25, 0.5, 2.0, 1.25, 0.75]);
        let s = assign_subrates(&r).unwrap();
        for (src, dst) in [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)] {
            let got = s.total(src, dst);
            let want = r.get(src, dst);
            assert!((got - want).abs() < 1e-12, "{src}->{dst}: {got} vs {want}");
        }
    }

    #[test]
    fn rejects_bad_rates() {
        assert_eq!(
            assign_subrates(&tuple([0.0, -1.0, 0.0, 0.0, 0.0, 0.0])),
            Err(SubRateError::Negative { index: 1 })
        );
        assert_eq!(
            assign_subrates(&tuple([f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0])),
            Err(SubRateError::NonFinite { index: 0 })
        );
        assert_eq!(
            assign_subrates(&tuple([f64::INFINITY, 0.0, 0.0, 0.0, 0.0, 0.0])),
            Err(SubRateError::NonFinite { index: 0 })
        );
    }
}

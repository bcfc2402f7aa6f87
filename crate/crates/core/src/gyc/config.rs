//! Gaussian channel configuration: gains, power, and role ordering.
//!
//! All closed-form allocations assume the users are indexed by descending
//! channel magnitude, `|h1| >= |h2| >= |h3|`. [`ChannelConfig::new`]
//! normalizes an arbitrary gain vector into that order, records the
//! permutation, and exposes the received SNRs `H_j = h_j^2 * P`. Gain signs
//! never matter: every formula uses squared gains or magnitude sums.

use std::fmt;

use crate::rate::RateTuple;

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ChannelConfig {
    /// Gain magnitudes in descending order.
    h: [f64; 3],
    power: f64,
    /// `users[role]` is the original (0-based) user index holding `role`.
    users: [usize; 3],
}

#[derive(Clone, PartialEq, Debug)]
pub enum ConfigError {
    NonFinite { what: &'static str, value: f64 },
    NegativePower(f64),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NonFinite { what, value } => {
                write!(f, "{what} must be finite, got {value}")
            }
            ConfigError::NegativePower(p) => write!(f, "power must be non-negative, got {p}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ChannelConfig {
    /// Builds a configuration from gains in any order; ties keep the
    /// original order, so the recorded permutation is deterministic.
    pub fn new(gains: [f64; 3], power: f64) -> Result<Self, ConfigError> {
        for (i, g) in gains.iter().enumerate() {
            if !g.is_finite() {
                return Err(ConfigError::NonFinite {
                    what: ["h1", "h2", "h3"][i],
                    value: *g,
                });
            }
        }
        if !power.is_finite() {
            return Err(ConfigError::NonFinite { what: "power", value: power });
        }
        if power < 0.0 {
            return Err(ConfigError::NegativePower(power));
        }
        let mut order = [0usize, 1, 2];
        order.sort_by(|a, b| {
            gains[*b]
                .abs()
                .partial_cmp(&gains[*a].abs())
                .expect("gains are finite")
                .then(a.cmp(b))
        });
        let h = [gains[order[0]].abs(), gains[order[1]].abs(), gains[order[2]].abs()];
        Ok(ChannelConfig { h, power, users: order })
    }

    /// Received SNRs in role order, `H_j = h_j^2 * P`.
    pub fn from_snrs(snrs: [f64; 3], power: f64) -> Result<Self, ConfigError> {
        let p = if power > 0.0 { power } else { 1.0 };
        ChannelConfig::new(snrs.map(|s| (s / p).sqrt()), p)
    }

    pub fn gains(&self) -> [f64; 3] {
        self.h
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Original 0-based user index occupying `role` (1..=3).
    pub fn user_of_role(&self, role: u8) -> usize {
        self.users[role as usize - 1]
    }

    /// True when the input gains were already in canonical order.
    pub fn is_identity_order(&self) -> bool {
        self.users == [0, 1, 2]
    }

    /// Received SNR of the user in `role` (1..=3).
    pub fn snr(&self, role: u8) -> f64 {
        let h = self.h[role as usize - 1];
        h * h * self.power
    }

    pub fn snrs(&self) -> [f64; 3] {
        [self.snr(1), self.snr(2), self.snr(3)]
    }

    /// `(|h2| + |h3|)^2 * P`, the coherent-combining SNR of the two weaker
    /// users.
    pub fn coherent_snr_23(&self) -> f64 {
        let s = self.h[1] + self.h[2];
        s * s * self.power
    }

    /// Reindexes a tuple given in original user numbering into role
    /// numbering: the result's R_ab is the rate from the user holding role
    /// a to the user holding role b.
    pub fn permute_tuple(&self, r: &RateTuple<f64>) -> RateTuple<f64> {
        let mut out = RateTuple::new([0.0; 6]);
        for a in 1u8..=3 {
            for b in 1u8..=3 {
                if a == b {
                    continue;
                }
                let src = self.users[a as usize - 1] as u8 + 1;
                let dst = self.users[b as usize - 1] as u8 + 1;
                out.set(a, b, r.get(src, dst));
            }
        }
        out
    }
}

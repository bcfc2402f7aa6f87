//! Rate tuples for the six directed message flows between three users.
//!
//! A tuple holds (R12, R13, R21, R23, R31, R32) in that fixed order, where
//! R_jk is the rate of the message from user j to user k. The deterministic
//! side of the crate instantiates tuples over exact rationals ([`Rat`]), the
//! Gaussian side over `f64`; region code is generic over the scalar.

use std::fmt;

use num::rational::Ratio;
use num::{Signed, Zero};
use serde::Serialize;

/// Exact rational scalar used for deterministic-channel rates.
pub type Rat = Ratio<i64>;

/// Component names in tuple order.
pub const RATE_NAMES: [&str; 6] = ["R12", "R13", "R21", "R23", "R31", "R32"];

/// (source, destination) user pairs in tuple order. Users are numbered 1..=3.
pub const DIRECTIONS: [(u8, u8); 6] = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)];

/// Index of the flow from `src` to `dst` in tuple order.
///
/// Panics if `src == dst` or either user is outside 1..=3.
pub fn dir_index(src: u8, dst: u8) -> usize {
    match (src, dst) {
        (1, 2) => 0,
        (1, 3) => 1,
        (2, 1) => 2,
        (2, 3) => 3,
        (3, 1) => 4,
        (3, 2) => 5,
        _ => panic!("no flow {src}->{dst}"),
    }
}

/// The six directed rates, indexed per [`DIRECTIONS`].
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
#[serde(transparent)]
pub struct RateTuple<S>(pub [S; 6]);

impl<S: Copy> RateTuple<S> {
    pub fn new(components: [S; 6]) -> Self {
        RateTuple(components)
    }

    pub fn components(&self) -> [S; 6] {
        self.0
    }

    /// Rate of the flow from `src` to `dst`.
    pub fn get(&self, src: u8, dst: u8) -> S {
        self.0[dir_index(src, dst)]
    }

    pub fn set(&mut self, src: u8, dst: u8, value: S) {
        self.0[dir_index(src, dst)] = value;
    }

    pub fn map<T, F: FnMut(S) -> T>(&self, mut f: F) -> RateTuple<T> {
        let c = &self.0;
        RateTuple([f(c[0]), f(c[1]), f(c[2]), f(c[3]), f(c[4]), f(c[5])])
    }
}

impl RateTuple<Rat> {
    pub fn from_integers(components: [i64; 6]) -> Self {
        RateTuple(components.map(Rat::from_integer))
    }

    pub fn to_f64(&self) -> RateTuple<f64> {
        self.map(rat_to_f64)
    }

    /// True when every component is a non-negative integer.
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|r| r.is_integer() && !r.is_negative())
    }
}

impl<S: fmt::Display + Copy> fmt::Display for RateTuple<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

pub fn rat_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Renders integers without a denominator, everything else as `p/q`.
pub fn format_rat(r: Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ParseRatError {
    Empty,
    Malformed(String),
    ZeroDenominator,
    /// The value does not fit in an `i64` numerator or denominator.
    Overflow(String),
}

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRatError::Empty => write!(f, "empty rational"),
            ParseRatError::Malformed(s) => write!(f, "malformed rational {s:?}"),
            ParseRatError::ZeroDenominator => write!(f, "zero denominator"),
            ParseRatError::Overflow(s) => write!(f, "rational {s:?} overflows i64"),
        }
    }
}

impl std::error::Error for ParseRatError {}

/// Parses `p/q`, a plain integer, or a base-10 decimal, all exactly.
///
/// Decimals never round through floating point: `0.3` becomes 3/10.
pub fn parse_rat(input: &str) -> Result<Rat, ParseRatError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i128, rest),
        None => (1i128, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(ParseRatError::Malformed(input.to_string()));
    }

    let (numer, denom) = if let Some((p, q)) = body.split_once('/') {
        let p = parse_digits(p).ok_or_else(|| ParseRatError::Malformed(input.to_string()))?;
        let q = parse_digits(q).ok_or_else(|| ParseRatError::Malformed(input.to_string()))?;
        if q == 0 {
            return Err(ParseRatError::ZeroDenominator);
        }
        (p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(ParseRatError::Malformed(input.to_string()));
        }
        let int_part = if int.is_empty() { 0 } else {
            parse_digits(int).ok_or_else(|| ParseRatError::Malformed(input.to_string()))?
        };
        if !frac.is_empty() && !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatError::Malformed(input.to_string()));
        }
        if frac.len() > 18 {
            return Err(ParseRatError::Overflow(input.to_string()));
        }
        let frac_part: i128 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
        let scale = 10i128.pow(frac.len() as u32);
        let numer = int_part
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or_else(|| ParseRatError::Overflow(input.to_string()))?;
        (numer, scale)
    } else {
        let v = parse_digits(body).ok_or_else(|| ParseRatError::Malformed(input.to_string()))?;
        (v, 1)
    };

    let g = num::integer::gcd(numer, denom);
    let (numer, denom) = if g == 0 { (0, 1) } else { (numer / g, denom / g) };
    let numer = i64::try_from(sign * numer).map_err(|_| ParseRatError::Overflow(input.to_string()))?;
    let denom = i64::try_from(denom).map_err(|_| ParseRatError::Overflow(input.to_string()))?;
    Ok(Rat::new(numer, denom))
}

fn parse_digits(s: &str) -> Option<i128> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || s.len() > 38 {
        return None;
    }
    s.parse().ok()
}

/// Parses six comma-separated rationals into a tuple.
pub fn parse_rate_tuple(input: &str) -> Result<RateTuple<Rat>, ParseRatError> {
    let parts: Vec<&str> = input.split(',').collect();
    if parts.len() != 6 {
        return Err(ParseRatError::Malformed(format!(
            "expected 6 comma-separated rates, got {}",
            parts.len()
        )));
    }
    let mut out = [Rat::zero(); 6];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_rat(part)?;
    }
    Ok(RateTuple(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rat("3/2").unwrap(), Rat::new(3, 2));
        assert_eq!(parse_rat("7").unwrap(), Rat::from_integer(7));
        assert_eq!(parse_rat("0.3").unwrap(), Rat::new(3, 10));
        assert_eq!(parse_rat("1.25").unwrap(), Rat::new(5, 4));
        assert_eq!(parse_rat("-1/3").unwrap(), Rat::new(-1, 3));
        assert_eq!(parse_rat(" 2/4 ").unwrap(), Rat::new(1, 2));
        assert_eq!(parse_rat(".5").unwrap(), Rat::new(1, 2));
        assert_eq!(parse_rat("5.").unwrap(), Rat::from_integer(5));
    }

    #[test]
    fn decimal_parsing_is_exact() {
        // 0.1 is not representable in binary floating point; the parse must
        // still produce exactly 1/10.
        assert_eq!(parse_rat("0.1").unwrap(), Rat::new(1, 10));
        assert_eq!(parse_rat("0.123456789").unwrap(), Rat::new(123_456_789, 1_000_000_000));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rat("").is_err());
        assert!(parse_rat("a").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("1/2/3").is_err());
        assert!(parse_rat("1.2.3").is_err());
        assert!(parse_rat(".").is_err());
        assert!(parse_rat("1e3").is_err());
        assert!(parse_rat("0x10").is_err());
    }

    #[test]
    fn tuple_parse_and_indexing() {
        let t = parse_rate_tuple("0,2,2,1,0,2").unwrap();
        assert_eq!(t.get(1, 2), Rat::from_integer(0));
        assert_eq!(t.get(1, 3), Rat::from_integer(2));
        assert_eq!(t.get(2, 1), Rat::from_integer(2));
        assert_eq!(t.get(2, 3), Rat::from_integer(1));
        assert_eq!(t.get(3, 1), Rat::from_integer(0));
        assert_eq!(t.get(3, 2), Rat::from_integer(2));
        assert!(parse_rate_tuple("1,2,3").is_err());
    }

    #[test]
    fn display_and_format() {
        assert_eq!(format_rat(Rat::new(3, 2)), "3/2");
        assert_eq!(format_rat(Rat::from_integer(4)), "4");
        let t = RateTuple::from_integers([0, 2, 2, 1, 0, 2]);
        assert_eq!(t.to_string(), "(0, 2, 2, 1, 0, 2)");
    }
}

//! Half-space descriptions of rate regions.
//!
//! Every region in this crate is an intersection of inequalities
//! `sum_i c_i * R_i <= rhs` with small non-negative integer coefficients
//! over the six rate components. The type is generic over the right-hand
//! side scalar: exact rationals for the deterministic channel, `f64` for
//! the Gaussian one. On the exact side the non-negative integer points of
//! a region can be enumerated, which gives a finite certificate that two
//! descriptions carve out the same grid.

use std::collections::BTreeSet;
use std::fmt;

use num::Zero;
use serde_json::{json, Value};

use crate::rate::{format_rat, parse_rat, Rat, RateTuple, RATE_NAMES};

/// Scalar a region's right-hand sides can be expressed in.
pub trait RegionScalar: Copy + PartialOrd {
    fn zero() -> Self;
    fn from_int(v: i64) -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn mul_int(self, k: i64) -> Self;
    fn to_json(self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
    fn render(self) -> String;
}

impl RegionScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn mul_int(self, k: i64) -> Self {
        self * k as f64
    }
    fn to_json(self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Option<Self> {
        v.as_f64()
    }
    fn render(self) -> String {
        format!("{self:.6}")
    }
}

impl RegionScalar for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_int(v: i64) -> Self {
        Rat::from_integer(v)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn mul_int(self, k: i64) -> Self {
        self * Rat::from_integer(k)
    }
    fn to_json(self) -> Value {
        if self.is_integer() {
            json!(*self.numer())
        } else {
            Value::String(format_rat(self))
        }
    }
    fn from_json(v: &Value) -> Option<Self> {
        if let Some(i) = v.as_i64() {
            Some(Rat::from_integer(i))
        } else {
            parse_rat(v.as_str()?).ok()
        }
    }
    fn render(self) -> String {
        format_rat(self)
    }
}

/// One half-space `sum_i coeffs[i] * R_i <= rhs`.
#[derive(Clone, PartialEq, Debug)]
pub struct Inequality<S> {
    pub coeffs: [i64; 6],
    pub rhs: S,
    /// Stable identifier, e.g. `cut-2rate-r31+r32`.
    pub tag: String,
}

impl<S: RegionScalar> Inequality<S> {
    pub fn new(coeffs: [i64; 6], rhs: S, tag: impl Into<String>) -> Self {
        Inequality { coeffs, rhs, tag: tag.into() }
    }

    pub fn lhs(&self, r: &RateTuple<S>) -> S {
        let mut acc = S::zero();
        for (c, v) in self.coeffs.iter().zip(r.0.iter()) {
            if *c != 0 {
                acc = acc.add(v.mul_int(*c));
            }
        }
        acc
    }

    /// `rhs - lhs`; non-negative iff the tuple satisfies the row.
    pub fn slack(&self, r: &RateTuple<S>) -> S {
        self.rhs.sub(self.lhs(r))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| **c != 0).count()
    }

    /// Human-readable form like `R12 + R32 + R13 <= 4`.
    pub fn render(&self) -> String {
        let mut lhs = String::new();
        for (c, name) in self.coeffs.iter().zip(RATE_NAMES) {
            if *c == 0 {
                continue;
            }
            if !lhs.is_empty() {
                lhs.push_str(" + ");
            }
            if *c != 1 {
                lhs.push_str(&format!("{c} "));
            }
            lhs.push_str(name);
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        format!("{lhs} <= {}", self.rhs.render())
    }
}

/// Outcome of testing one tuple against every row of a region.
#[derive(Clone, Debug)]
pub struct Membership<S> {
    pub inside: bool,
    /// `rhs - lhs` per row, in region row order.
    pub slacks: Vec<S>,
    /// Row with the smallest slack; `None` only for an empty region.
    pub min_row: Option<usize>,
    pub first_violation: Option<usize>,
}

/// Intersection of half-spaces over the six rates.
#[derive(Clone, PartialEq, Debug)]
pub struct LinearRegion<S> {
    pub ineqs: Vec<Inequality<S>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RegionError {
    /// A variable has no positive coefficient in any row, so the set of
    /// non-negative integer points is infinite.
    Unbounded(&'static str),
    /// Grid enumeration requires non-negative coefficients.
    NegativeCoeff(String),
    BadJson(String),
}

impl fmt::Display for RegionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionError::Unbounded(var) => write!(f, "region is unbounded in {var}"),
            RegionError::NegativeCoeff(tag) => {
                write!(f, "row {tag} has a negative coefficient")
            }
            RegionError::BadJson(msg) => write!(f, "bad region json: {msg}"),
        }
    }
}

impl std::error::Error for RegionError {}

impl<S: RegionScalar> LinearRegion<S> {
    pub fn new(ineqs: Vec<Inequality<S>>) -> Self {
        LinearRegion { ineqs }
    }

    /// Tests membership with slack tolerance `tol` (use zero for exact).
    pub fn contains(&self, r: &RateTuple<S>, tol: S) -> bool {
        self.membership(r, tol).inside
    }

    pub fn membership(&self, r: &RateTuple<S>, tol: S) -> Membership<S> {
        let mut slacks = Vec::with_capacity(self.ineqs.len());
        let mut min_row = None;
        let mut first_violation = None;
        let threshold = S::zero().sub(tol);
        for (i, ineq) in self.ineqs.iter().enumerate() {
            let s = ineq.slack(r);
            match min_row {
                None => min_row = Some(i),
                Some(m) if s < slacks[m] => min_row = Some(i),
                _ => {}
            }
            if s < threshold && first_violation.is_none() {
                first_violation = Some(i);
            }
            slacks.push(s);
        }
        Membership { inside: first_violation.is_none(), slacks, min_row, first_violation }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vars": RATE_NAMES,
            "inequalities": self.ineqs.iter().map(|q| json!({
                "coeffs": q.coeffs.to_vec(),
                "rhs": q.rhs.to_json(),
                "tag": q.tag,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, RegionError> {
        let rows = v
            .get("inequalities")
            .and_then(Value::as_array)
            .ok_or_else(|| RegionError::BadJson("missing inequalities array".into()))?;
        let mut ineqs = Vec::with_capacity(rows.len());
        for row in rows {
            let coeffs_v = row
                .get("coeffs")
                .and_then(Value::as_array)
                .ok_or_else(|| RegionError::BadJson("row missing coeffs".into()))?;
            if coeffs_v.len() != 6 {
                return Err(RegionError::BadJson("coeffs must have 6 entries".into()));
            }
            let mut coeffs = [0i64; 6];
            for (slot, cv) in coeffs.iter_mut().zip(coeffs_v) {
                *slot = cv
                    .as_i64()
                    .ok_or_else(|| RegionError::BadJson("non-integer coefficient".into()))?;
            }
            let rhs = row
                .get("rhs")
                .and_then(S::from_json)
                .ok_or_else(|| RegionError::BadJson("row missing rhs".into()))?;
            let tag = row.get("tag").and_then(Value::as_str).unwrap_or("").to_string();
            ineqs.push(Inequality { coeffs, rhs, tag });
        }
        Ok(LinearRegion { ineqs })
    }
}

impl LinearRegion<Rat> {
    /// Enumerates all non-negative integer tuples inside the region.
    ///
    /// Requires every coefficient to be non-negative and every variable to be
    /// bounded by at least one row, which holds for all regions this crate
    /// constructs.
    pub fn integer_points(&self) -> Result<BTreeSet<[i64; 6]>, RegionError> {
        for q in &self.ineqs {
            if q.coeffs.iter().any(|c| *c < 0) {
                return Err(RegionError::NegativeCoeff(q.tag.clone()));
            }
        }
        let mut bounds = [0i64; 6];
        for (i, bound) in bounds.iter_mut().enumerate() {
            let mut best: Option<i64> = None;
            for q in &self.ineqs {
                if q.coeffs[i] > 0 {
                    let b = (q.rhs / Rat::from_integer(q.coeffs[i])).floor().to_integer();
                    best = Some(best.map_or(b, |prev| prev.min(b)));
                }
            }
            match best {
                Some(b) => *bound = b,
                None => return Err(RegionError::Unbounded(RATE_NAMES[i])),
            }
        }
        let mut points = BTreeSet::new();
        if bounds.iter().any(|b| *b < 0) {
            return Ok(points);
        }
        let mut remaining: Vec<Rat> = self.ineqs.iter().map(|q| q.rhs).collect();
        let mut current = [0i64; 6];
        self.enumerate_rec(0, &bounds, &mut remaining, &mut current, &mut points);
        Ok(points)
    }

    fn enumerate_rec(
        &self,
        var: usize,
        bounds: &[i64; 6],
        remaining: &mut Vec<Rat>,
        current: &mut [i64; 6],
        points: &mut BTreeSet<[i64; 6]>,
    ) {
        if var == 6 {
            points.insert(*current);
            return;
        }
        for value in 0..=bounds[var] {
            current[var] = value;
            let mut feasible = true;
            for (rem, q) in remaining.iter().zip(&self.ineqs) {
                let used = Rat::from_integer(q.coeffs[var] * value);
                if *rem < used {
                    feasible = false;
                    break;
                }
            }
            if !feasible {
                // Coefficients are non-negative, so larger values only fail harder.
                break;
            }
            let saved: Vec<Rat> = remaining.clone();
            for (rem, q) in remaining.iter_mut().zip(&self.ineqs) {
                *rem = *rem - Rat::from_integer(q.coeffs[var] * value);
            }
            self.enumerate_rec(var + 1, bounds, remaining, current, points);
            *remaining = saved;
        }
        current[var] = 0;
    }

    pub fn integer_point_count(&self) -> Result<usize, RegionError> {
        Ok(self.integer_points()?.len())
    }
}

/// True when two exact regions contain the same non-negative integer points.
pub fn grid_equal(a: &LinearRegion<Rat>, b: &LinearRegion<Rat>) -> Result<bool, RegionError> {
    Ok(a.integer_points()? == b.integer_points()?)
}

//! Capacity bounds for the deterministic channel as exact polytopes.
//!
//! [`outer_region`] is tight: the planner in [`super::scheme`] achieves every
//! integer point in it. [`cutset_region`] is the classical information-flow
//! bound; it is weaker, and [`redundant_cutset_rows`] lists the four of its
//! pair bounds that the tighter region makes redundant.

use crate::rate::Rat;
use crate::region::{Inequality, LinearRegion};

use super::channel::DycParams;

fn rat(v: u32) -> Rat {
    Rat::from_integer(v as i64)
}

/// The tight eight-row bound.
///
/// Two rows cap the total flow through the weakest user in each direction;
/// the other six arise from giving one user's messages to another as side
/// information, which collapses the three-user exchange into a two-user one.
pub fn outer_region(p: &DycParams) -> LinearRegion<Rat> {
    let [n1, n2, n3] = p.levels();
    LinearRegion::new(vec![
        Inequality::new([0, 0, 0, 0, 1, 1], rat(n3), "cut-2rate-r31+r32"),
        Inequality::new([0, 1, 0, 1, 0, 0], rat(n3), "cut-2rate-r13+r23"),
        Inequality::new([1, 1, 0, 0, 0, 1], rat(n2), "genie-3rate-r12+r32+r13"),
        Inequality::new([1, 0, 0, 0, 1, 1], rat(n1), "genie-3rate-r12+r32+r31"),
        Inequality::new([0, 0, 1, 0, 1, 1], rat(n2), "genie-3rate-r21+r31+r32"),
        Inequality::new([0, 0, 1, 1, 1, 0], rat(n2), "genie-3rate-r21+r31+r23"),
        Inequality::new([1, 1, 0, 1, 0, 0], rat(n2), "genie-3rate-r13+r23+r12"),
        Inequality::new([0, 1, 1, 1, 0, 0], rat(n1), "genie-3rate-r13+r23+r21"),
    ])
}

/// The twelve-row cut-set bound: each rate is capped by the weaker endpoint,
/// and each user's outgoing (incoming) pair by the better of the cuts around
/// the source (sink).
pub fn cutset_region(p: &DycParams) -> LinearRegion<Rat> {
    let [n1, n2, n3] = p.levels();
    LinearRegion::new(vec![
        Inequality::new([1, 0, 0, 0, 0, 0], rat(n1.min(n2)), "cut-1rate-r12"),
        Inequality::new([0, 1, 0, 0, 0, 0], rat(n1.min(n3)), "cut-1rate-r13"),
        Inequality::new([0, 0, 1, 0, 0, 0], rat(n2.min(n1)), "cut-1rate-r21"),
        Inequality::new([0, 0, 0, 1, 0, 0], rat(n2.min(n3)), "cut-1rate-r23"),
        Inequality::new([0, 0, 0, 0, 1, 0], rat(n3.min(n1)), "cut-1rate-r31"),
        Inequality::new([0, 0, 0, 0, 0, 1], rat(n3.min(n2)), "cut-1rate-r32"),
        Inequality::new([1, 1, 0, 0, 0, 0], rat(n1.min(n2.max(n3))), "cut-2rate-r12+r13"),
        Inequality::new([0, 0, 1, 1, 0, 0], rat(n2.min(n1.max(n3))), "cut-2rate-r21+r23"),
        Inequality::new([0, 0, 0, 0, 1, 1], rat(n3.min(n1.max(n2))), "cut-2rate-r31+r32"),
        Inequality::new([0, 0, 1, 0, 1, 0], rat(n1.min(n2.max(n3))), "cut-2rate-r21+r31"),
        Inequality::new([1, 0, 0, 0, 0, 1], rat(n2.min(n1.max(n3))), "cut-2rate-r12+r32"),
        Inequality::new([0, 1, 0, 1, 0, 0], rat(n3.min(n1.max(n2))), "cut-2rate-r13+r23"),
    ])
}

/// The four cut-set pair bounds with right-hand side `n2` that are implied
/// by the eight-row region: adding them back never changes the integer grid.
pub fn redundant_cutset_rows(p: &DycParams) -> Vec<Inequality<Rat>> {
    let n2 = p.n2();
    vec![
        Inequality::new([1, 1, 0, 0, 0, 0], rat(n2), "cut-2rate-r12+r13"),
        Inequality::new([0, 0, 1, 0, 1, 0], rat(n2), "cut-2rate-r21+r31"),
        Inequality::new([0, 0, 1, 1, 0, 0], rat(n2), "cut-2rate-r21+r23"),
        Inequality::new([1, 0, 0, 0, 0, 1], rat(n2), "cut-2rate-r12+r32"),
    ]
}

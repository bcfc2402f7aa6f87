//! Bit-exact end-to-end simulation of a level plan.
//!
//! Encoding follows the plan literally: every stream bit is XORed into its
//! senders' transmit words at the plan's uplink level, the relay permutes
//! its received word, and each user observes a shifted copy. Decoding uses
//! only what a user legitimately has: its own transmitted bits as side
//! information plus chunks it has already decoded this channel use. On a
//! valid plan every message bit comes back intact; the report records any
//! position that does not.

use std::fmt;

use rand::Rng;

use crate::rate::{dir_index, DIRECTIONS};

use super::channel::{
    downlink_receive, receive_index, transmit_index, uplink_receive, BinaryWord, ChannelError,
    DycParams,
};
use super::scheme::{LevelPlan, StreamKind};

/// The six messages of one channel use, indexed like a rate tuple; the
/// message for src -> dst holds exactly `R_sd` bits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Messages {
    pub bits: [Vec<u8>; 6],
}

impl Messages {
    pub fn zeros(rates: &[u32; 6]) -> Self {
        Messages { bits: rates.map(|r| vec![0u8; r as usize]) }
    }

    pub fn total_bits(rates: &[u32; 6]) -> usize {
        rates.iter().map(|r| *r as usize).sum()
    }

    /// Deterministic payload: the bits of `index`, least significant first,
    /// laid across the six messages in tuple order. `index` ranges over
    /// `0..2^total` to cover every payload exactly once.
    pub fn from_index(rates: &[u32; 6], index: u64) -> Self {
        let mut msgs = Messages::zeros(rates);
        let mut k = 0;
        for dir in 0..6 {
            for t in 0..rates[dir] as usize {
                msgs.bits[dir][t] = ((index >> k) & 1) as u8;
                k += 1;
            }
        }
        msgs
    }

    pub fn random<R: Rng>(rates: &[u32; 6], rng: &mut R) -> Self {
        let mut msgs = Messages::zeros(rates);
        for dir in 0..6 {
            for t in 0..rates[dir] as usize {
                msgs.bits[dir][t] = rng.gen_range(0..=1);
            }
        }
        msgs
    }

    fn get(&self, src: u8, dst: u8, pos: usize) -> u8 {
        self.bits[dir_index(src, dst)][pos]
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SimError {
    MessageLength { dir: usize, expected: usize, got: usize },
    TooManyPayloads { total_bits: usize, limit: usize },
    Channel(ChannelError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::MessageLength { dir, expected, got } => {
                let (s, d) = DIRECTIONS[*dir];
                write!(f, "message {s}->{d} has {got} bits, expected {expected}")
            }
            SimError::TooManyPayloads { total_bits, limit } => write!(
                f,
                "{total_bits} message bits exceed the exhaustive limit of {limit}"
            ),
            SimError::Channel(e) => write!(f, "channel error: {e}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<ChannelError> for SimError {
    fn from(e: ChannelError) -> Self {
        SimError::Channel(e)
    }
}

/// Result of one simulated channel use.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecodingReport {
    pub decoded: Messages,
    /// Per direction, bit positions where the decode differs from the sent
    /// message.
    pub errors: [Vec<usize>; 6],
    pub total_bits: usize,
    pub total_errors: usize,
}

impl DecodingReport {
    pub fn ok(&self) -> bool {
        self.total_errors == 0
    }
}

/// Runs one channel use of `plan` carrying `msgs` and decodes at all users.
pub fn simulate(
    p: &DycParams,
    plan: &LevelPlan,
    msgs: &Messages,
) -> Result<DecodingReport, SimError> {
    for dir in 0..6 {
        let expected = plan.rates[dir] as usize;
        if msgs.bits[dir].len() != expected {
            return Err(SimError::MessageLength { dir, expected, got: msgs.bits[dir].len() });
        }
    }
    let q = p.q();
    let split = &plan.split;

    // The bit a given sender contributes at stream position t, as
    // (direction, offset into that direction's message).
    let sender_bit = |kind: &StreamKind, sender: u8, t: usize| -> (u8, u8, usize) {
        match *kind {
            StreamKind::Bidir { a, b } => {
                let dst = if sender == a { b } else { a };
                let [bid, _, _] = split.layout(sender, dst);
                (sender, dst, bid.start + t)
            }
            StreamKind::Cyclic { order123, .. } => {
                // On either cycle each user forwards to its cycle successor.
                let dst = match (order123, sender) {
                    (true, 1) => 2,
                    (true, 2) => 3,
                    (true, 3) => 1,
                    (false, 1) => 3,
                    (false, 3) => 2,
                    (false, 2) => 1,
                    _ => unreachable!(),
                };
                let [_, cyc, _] = split.layout(sender, dst);
                (sender, dst, cyc.start + t)
            }
            StreamKind::Uni { src, dst } => {
                let [_, _, uni] = split.layout(src, dst);
                (src, dst, uni.start + t)
            }
        }
    };

    let mut x = [BinaryWord::zeros(q), BinaryWord::zeros(q), BinaryWord::zeros(q)];
    for stream in &plan.streams {
        for (t, &level) in stream.up.iter().enumerate() {
            for sender in stream.kind.senders() {
                let (s, d, pos) = sender_bit(&stream.kind, sender, t);
                let bit = msgs.get(s, d, pos);
                let idx = transmit_index(p.n_of(sender), level);
                x[sender as usize - 1].xor_bit(idx, bit);
            }
        }
    }

    let y_r = uplink_receive(p, [&x[0], &x[1], &x[2]])?;
    let x_r = plan.relay_map.apply(&y_r)?;
    let y = [
        downlink_receive(p, &x_r, 1)?,
        downlink_receive(p, &x_r, 2)?,
        downlink_receive(p, &x_r, 3)?,
    ];
    let read = |user: u8, stream: &super::scheme::Stream, t: usize| -> u8 {
        let idx = receive_index(q, p.n_of(user), stream.down[t]);
        y[user as usize - 1].get(idx)
    };

    let mut decoded = Messages::zeros(&plan.rates);
    let mut put = |src: u8, dst: u8, pos: usize, bit: u8| {
        decoded.bits[dir_index(src, dst)][pos] = bit;
    };

    for stream in &plan.streams {
        match stream.kind {
            StreamKind::Bidir { a, b } => {
                // Each partner strips its own contribution from the XOR.
                for (recv, peer) in [(a, b), (b, a)] {
                    let [bid, _, _] = split.layout(recv, peer);
                    for t in 0..stream.rate as usize {
                        let own = msgs.get(recv, peer, bid.start + t);
                        let bit = read(recv, stream, t) ^ own;
                        let [peer_bid, _, _] = split.layout(peer, recv);
                        put(peer, recv, peer_bid.start + t, bit);
                    }
                }
            }
            StreamKind::Cyclic { .. } => {}
            StreamKind::Uni { src, dst } => {
                let [_, _, uni] = split.layout(src, dst);
                for t in 0..stream.rate as usize {
                    put(src, dst, uni.start + t, read(dst, stream, t));
                }
            }
        }
    }

    // Cyclic decoding needs both chunks, and one user chains through a chunk
    // it decoded first, so it runs after the stream loop.
    let find = |top: bool| plan.streams.iter().find(
        |s| matches!(s.kind, StreamKind::Cyclic { top: t, .. } if t == top),
    );
    if let (Some(top), Some(bot)) = (find(true), find(false)) {
        let order123 = matches!(top.kind, StreamKind::Cyclic { order123: true, .. });
        let c = top.rate as usize;
        let cyc = |s: u8, d: u8| split.layout(s, d)[1].clone();
        if order123 {
            // Top carries c12 XOR c23, bottom c23 XOR c31.
            let (r12, r23, r31) = (cyc(1, 2), cyc(2, 3), cyc(3, 1));
            for t in 0..c {
                let hat12 = read(2, top, t) ^ msgs.get(2, 3, r23.start + t);
                put(1, 2, r12.start + t, hat12);
                let hat23_u3 = read(3, bot, t) ^ msgs.get(3, 1, r31.start + t);
                put(2, 3, r23.start + t, hat23_u3);
                let hat23_u1 = read(1, top, t) ^ msgs.get(1, 2, r12.start + t);
                let hat31 = read(1, bot, t) ^ hat23_u1;
                put(3, 1, r31.start + t, hat31);
            }
        } else {
            // Top carries c13 XOR c21, bottom c13 XOR c32.
            let (r13, r32, r21) = (cyc(1, 3), cyc(3, 2), cyc(2, 1));
            for t in 0..c {
                let hat13 = read(3, bot, t) ^ msgs.get(3, 2, r32.start + t);
                put(1, 3, r13.start + t, hat13);
                let hat21 = read(1, top, t) ^ msgs.get(1, 3, r13.start + t);
                put(2, 1, r21.start + t, hat21);
                let hat13_u2 = read(2, top, t) ^ msgs.get(2, 1, r21.start + t);
                let hat32 = read(2, bot, t) ^ hat13_u2;
                put(3, 2, r32.start + t, hat32);
            }
        }
    }

    let mut errors: [Vec<usize>; 6] = Default::default();
    let mut total_errors = 0;
    for dir in 0..6 {
        for (pos, (sent, got)) in msgs.bits[dir].iter().zip(&decoded.bits[dir]).enumerate() {
            if sent != got {
                errors[dir].push(pos);
                total_errors += 1;
            }
        }
    }
    Ok(DecodingReport {
        decoded,
        errors,
        total_bits: Messages::total_bits(&plan.rates),
        total_errors,
    })
}

/// Summary of sweeping every payload (or a sample of payloads) of a plan.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SweepReport {
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<u64>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// Simulates every one of the `2^total_bits` payloads.
///
/// Errors when the payload space exceeds 2^24 cases; sample instead.
pub fn simulate_exhaustive(p: &DycParams, plan: &LevelPlan) -> Result<SweepReport, SimError> {
    let total = plan.total_bits();
    if total > 24 {
        return Err(SimError::TooManyPayloads { total_bits: total, limit: 24 });
    }
    let cases = 1u64 << total;
    let mut failures = 0;
    let mut first_failure = None;
    for index in 0..cases {
        let msgs = Messages::from_index(&plan.rates, index);
        let report = simulate(p, plan, &msgs)?;
        if !report.ok() {
            failures += 1;
            first_failure.get_or_insert(index);
        }
    }
    Ok(SweepReport { cases, failures, first_failure })
}

/// Simulates `trials` random payloads drawn from `rng`.
pub fn simulate_random<R: Rng>(
    p: &DycParams,
    plan: &LevelPlan,
    trials: u64,
    rng: &mut R,
) -> Result<SweepReport, SimError> {
    let mut failures = 0;
    let mut first_failure = None;
    for trial in 0..trials {
        let msgs = Messages::random(&plan.rates, rng);
        let report = simulate(p, plan, &msgs)?;
        if !report.ok() {
            failures += 1;
            first_failure.get_or_insert(trial);
        }
    }
    Ok(SweepReport { cases: trials, failures, first_failure })
}

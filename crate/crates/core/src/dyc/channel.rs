//! Words, shifts, and the relay's forwarding map.
//!
//! Conventions used throughout the deterministic side:
//!
//! * Words are length `q = n1`, index 0 is the most significant bit.
//! * The down-shift moves bits toward higher indices; shifting user `j`'s
//!   word by `q - n_j` means exactly its top `n_j` bits reach the relay.
//! * Uplink levels count from the bottom of the relay's received word
//!   (level 1 is the least significant position, level `q` the top), so the
//!   level `l` signal of user `j` requires `l <= n_j`.
//! * Downlink levels count from the top of the relay's transmit word
//!   (level 1 is index 0); user `j` observes levels `1..=n_j`.

use std::fmt;

/// Channel profile `(n1, n2, n3)` with `n1 >= n2 >= n3 >= 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DycParams {
    n: [u32; 3],
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ChannelError {
    /// Levels must satisfy `n1 >= n2 >= n3 >= 0`.
    UnorderedLevels([u32; 3]),
    WordLength { expected: usize, got: usize },
    BadBit(u8),
    LevelOutOfRange { level: u32, q: u32 },
    DuplicateUplinkLevel(u32),
    DuplicateDownlinkLevel(u32),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::UnorderedLevels(n) => {
                write!(f, "levels {n:?} must be non-increasing")
            }
            ChannelError::WordLength { expected, got } => {
                write!(f, "word length {got}, expected {expected}")
            }
            ChannelError::BadBit(b) => write!(f, "bit value {b} is not 0 or 1"),
            ChannelError::LevelOutOfRange { level, q } => {
                write!(f, "level {level} outside 1..={q}")
            }
            ChannelError::DuplicateUplinkLevel(l) => write!(f, "uplink level {l} mapped twice"),
            ChannelError::DuplicateDownlinkLevel(l) => {
                write!(f, "downlink level {l} mapped twice")
            }
        }
    }
}

impl std::error::Error for ChannelError {}

impl DycParams {
    pub fn new(n1: u32, n2: u32, n3: u32) -> Result<Self, ChannelError> {
        if n1 >= n2 && n2 >= n3 {
            Ok(DycParams { n: [n1, n2, n3] })
        } else {
            Err(ChannelError::UnorderedLevels([n1, n2, n3]))
        }
    }

    pub fn levels(&self) -> [u32; 3] {
        self.n
    }

    /// Level count of `user` (1..=3).
    pub fn n_of(&self, user: u8) -> u32 {
        self.n[user as usize - 1]
    }

    pub fn n1(&self) -> u32 {
        self.n[0]
    }
    pub fn n2(&self) -> u32 {
        self.n[1]
    }
    pub fn n3(&self) -> u32 {
        self.n[2]
    }

    /// Word length, equal to `n1`.
    pub fn q(&self) -> usize {
        self.n[0] as usize
    }

    /// Down-shift applied to `user`'s signal on both uplink and downlink.
    pub fn shift_of(&self, user: u8) -> usize {
        self.q() - self.n_of(user) as usize
    }
}

/// Fixed-length GF(2) word; index 0 is the most significant bit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinaryWord {
    bits: Vec<u8>,
}

impl BinaryWord {
    pub fn zeros(len: usize) -> Self {
        BinaryWord { bits: vec![0; len] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self, ChannelError> {
        if let Some(&b) = bits.iter().find(|b| **b > 1) {
            return Err(ChannelError::BadBit(b));
        }
        Ok(BinaryWord { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, idx: usize) -> u8 {
        self.bits[idx]
    }

    pub fn set(&mut self, idx: usize, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits[idx] = bit;
    }

    pub fn xor_bit(&mut self, idx: usize, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits[idx] ^= bit;
    }

    pub fn xor_assign(&mut self, other: &BinaryWord) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| *b == 0)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Index of uplink level `level` in the relay's received word.
pub fn uplink_level_index(q: usize, level: u32) -> usize {
    debug_assert!(level >= 1 && level as usize <= q);
    q - level as usize
}

/// Index in user `j`'s transmit word that lands on uplink level `level`.
/// Valid only for `level <= n_j`.
pub fn transmit_index(n_j: u32, level: u32) -> usize {
    debug_assert!(level >= 1 && level <= n_j);
    (n_j - level) as usize
}

/// Index of downlink level `level` in the relay's transmit word.
pub fn downlink_level_index(level: u32) -> usize {
    debug_assert!(level >= 1);
    level as usize - 1
}

/// Index in user `j`'s received word holding downlink level `level`.
/// Valid only for `level <= n_j`.
pub fn receive_index(q: usize, n_j: u32, level: u32) -> usize {
    debug_assert!(level >= 1 && level <= n_j);
    level as usize - 1 + (q - n_j as usize)
}

/// Relay reception: the XOR of every user's down-shifted word.
pub fn uplink_receive(
    p: &DycParams,
    words: [&BinaryWord; 3],
) -> Result<BinaryWord, ChannelError> {
    let q = p.q();
    let mut y = BinaryWord::zeros(q);
    for (user, x) in (1u8..=3).zip(words) {
        if x.len() != q {
            return Err(ChannelError::WordLength { expected: q, got: x.len() });
        }
        let shift = p.shift_of(user);
        for idx in shift..q {
            y.bits[idx] ^= x.bits[idx - shift];
        }
    }
    Ok(y)
}

/// What `user` observes when the relay transmits `x_r`: the same down-shift
/// as on the uplink, so only the relay's top `n_j` levels are visible.
pub fn downlink_receive(
    p: &DycParams,
    x_r: &BinaryWord,
    user: u8,
) -> Result<BinaryWord, ChannelError> {
    let q = p.q();
    if x_r.len() != q {
        return Err(ChannelError::WordLength { expected: q, got: x_r.len() });
    }
    let shift = p.shift_of(user);
    let mut y = BinaryWord::zeros(q);
    for idx in shift..q {
        y.bits[idx] = x_r.bits[idx - shift];
    }
    Ok(y)
}

/// Bit permutation the relay applies between reception and transmission,
/// expressed as uplink level -> downlink level pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelayMap {
    q: usize,
    /// Per received-word index, the transmit-word index it is copied to.
    fwd: Vec<Option<usize>>,
}

impl RelayMap {
    pub fn from_level_pairs(q: usize, pairs: &[(u32, u32)]) -> Result<Self, ChannelError> {
        let mut fwd = vec![None; q];
        let mut down_used = vec![false; q];
        for &(up, down) in pairs {
            for level in [up, down] {
                if level < 1 || level as usize > q {
                    return Err(ChannelError::LevelOutOfRange { level, q: q as u32 });
                }
            }
            let src = uplink_level_index(q, up);
            let dst = downlink_level_index(down);
            if fwd[src].is_some() {
                return Err(ChannelError::DuplicateUplinkLevel(up));
            }
            if down_used[dst] {
                return Err(ChannelError::DuplicateDownlinkLevel(down));
            }
            fwd[src] = Some(dst);
            down_used[dst] = true;
        }
        Ok(RelayMap { q, fwd })
    }

    /// Pairs sorted by uplink level.
    pub fn level_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs: Vec<(u32, u32)> = self
            .fwd
            .iter()
            .enumerate()
            .filter_map(|(src, dst)| {
                dst.map(|d| ((self.q - src) as u32, d as u32 + 1))
            })
            .collect();
        pairs.sort_unstable();
        pairs
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Builds the relay's transmit word from its received word. Unmapped
    /// received bits are dropped; unfilled transmit bits stay zero.
    pub fn apply(&self, y_r: &BinaryWord) -> Result<BinaryWord, ChannelError> {
        if y_r.len() != self.q {
            return Err(ChannelError::WordLength { expected: self.q, got: y_r.len() });
        }
        let mut x_r = BinaryWord::zeros(self.q);
        for (src, dst) in self.fwd.iter().enumerate() {
            if let Some(dst) = *dst {
                x_r.bits[dst] = y_r.bits[src];
            }
        }
        Ok(x_r)
    }
}

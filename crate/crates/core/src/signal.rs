//! Sparse signals over a `2^n` index space.
//!
//! Bit `1` of an index is its most significant bit, so the index written as
//! `b_1 b_2 ... b_n` has integer value `sum b_j 2^(n-j)`. Every other module
//! relies on this ordering.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, DENSE_LIMIT};

/// Largest supported bit count for an index.
pub const MAX_BITS: u32 = 63;

/// An `n`-bit index into the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitIndex {
    n: u32,
    value: u64,
}

impl BitIndex {
    pub fn new(n: u32, value: u64) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::InvalidSize(format!("bit count {n} outside 1..={MAX_BITS}")));
        }
        if value >> n != 0 {
            return Err(Error::InvalidSize(format!("index {value} does not fit in {n} bits")));
        }
        Ok(Self { n, value })
    }

    /// Builds an index from `b_1 ... b_n`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut value = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidSize(format!("bit value {b} is not binary")));
            }
            value = (value << 1) | u64::from(b);
        }
        Self::new(bits.len() as u32, value)
    }

    pub(crate) fn new_unchecked(n: u32, value: u64) -> Self {
        debug_assert!(n <= MAX_BITS && value >> n == 0);
        Self { n, value }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit `j` (1-based, `b_1` most significant).
    pub fn bit(&self, j: u32) -> u8 {
        assert!(j >= 1 && j <= self.n, "bit position {j} outside 1..={}", self.n);
        ((self.value >> (self.n - j)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.n).map(|j| self.bit(j)).collect()
    }
}

impl fmt::Display for BitIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.n as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub position: BitIndex,
    pub value: f64,
}

/// A signal given by its nonzero entries, kept sorted by position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalFile", into = "SignalFile")]
pub struct SparseSignal {
    n: u32,
    spikes: Vec<Spike>,
}

impl SparseSignal {
    /// Validates positions (distinct, in range) and values (finite, nonzero).
    /// An empty spike list is accepted; it is what a reconstruction of a zero
    /// measurement looks like.
    pub fn new(n: u32, spikes: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::InvalidSize(format!("bit count {n} outside 1..={MAX_BITS}")));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (pos, value) in spikes {
            let position = BitIndex::new(n, pos)?;
            if !seen.insert(pos) {
                return Err(Error::InvalidSignal(format!("duplicate position {pos}")));
            }
            if value == 0.0 || !value.is_finite() {
                return Err(Error::InvalidSignal(format!("spike at {pos} has value {value}")));
            }
            out.push(Spike { position, value });
        }
        out.sort_by_key(|s| s.position);
        Ok(Self { n, spikes: out })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn sparsity(&self) -> usize {
        self.spikes.len()
    }

    pub fn positions(&self) -> impl Iterator<Item = BitIndex> + '_ {
        self.spikes.iter().map(|s| s.position)
    }

    pub fn value_at(&self, pos: u64) -> Option<f64> {
        self.spikes
            .binary_search_by_key(&pos, |s| s.position.value())
            .ok()
            .map(|i| self.spikes[i].value)
    }

    pub fn total(&self) -> f64 {
        self.spikes.iter().map(|s| s.value).sum()
    }

    /// Dense form of length `2^n`.
    pub fn dense_vector(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::Capacity { n: self.n, limit: DENSE_LIMIT });
        }
        let mut v = vec![0.0; 1usize << self.n];
        for s in &self.spikes {
            v[s.position.value() as usize] = s.value;
        }
        Ok(v)
    }

    /// Inverse of [`dense_vector`](Self::dense_vector): keeps the nonzero entries.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSize(format!("dense length {len} is not 2^n with n >= 1")));
        }
        let n = len.trailing_zeros();
        Self::new(
            n,
            values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i as u64, *v)),
        )
    }
}

/// Draws `s` distinct positions uniformly without replacement and values
/// uniformly from `(lo, hi]`.
pub fn random_sparse_signal(n: u32, s: usize, value_range: (f64, f64), seed: u64) -> Result<SparseSignal> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::InvalidSize(format!("bit count {n} outside 1..={MAX_BITS}")));
    }
    let (lo, hi) = value_range;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!("value range ({lo}, {hi}] must be positive and non-empty")));
    }
    let space = 1u64 << n;
    if s == 0 || s as u64 > space {
        return Err(Error::InvalidSparsity { n, s });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, space as usize, s);
    let spikes: Vec<(u64, f64)> = picks
        .into_iter()
        .map(|p| (p as u64, hi - rng.random::<f64>() * (hi - lo)))
        .collect();
    SparseSignal::new(n, spikes)
}

#[derive(Serialize, Deserialize)]
struct SignalFile {
    n: u32,
    spikes: Vec<SpikeEntry>,
}

#[derive(Serialize, Deserialize)]
struct SpikeEntry {
    pos: u64,
    val: f64,
}

impl TryFrom<SignalFile> for SparseSignal {
    type Error = Error;

    fn try_from(f: SignalFile) -> Result<Self> {
        SparseSignal::new(f.n, f.spikes.into_iter().map(|e| (e.pos, e.val)))
    }
}

impl From<SparseSignal> for SignalFile {
    fn from(s: SparseSignal) -> Self {
        SignalFile {
            n: s.n,
            spikes: s
                .spikes
                .into_iter()
                .map(|sp| SpikeEntry { pos: sp.position.value(), val: sp.value })
                .collect(),
        }
    }
}

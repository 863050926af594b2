//! Structured binary measurement patterns.
//!
//! A pattern fixes the values of a few index bits and sums the signal over
//! every index consistent with them. The measurement matrix is never stored:
//! row `i`, column `z` is 1 exactly when `z` satisfies pattern `i`.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::signal::{BitIndex, SparseSignal, MAX_BITS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint {
    /// 1-based bit position.
    pub bit: u32,
    #[serde(rename = "val")]
    pub value: u8,
}

/// One measurement row: a set of fixed bits. Free bits are summed over.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern {
    constraints: Vec<Constraint>,
}

impl Pattern {
    pub fn new(constraints: impl IntoIterator<Item = (u32, u8)>) -> Self {
        Self {
            constraints: constraints
                .into_iter()
                .map(|(bit, value)| Constraint { bit, value })
                .collect(),
        }
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn k(&self) -> usize {
        self.constraints.len()
    }

    fn validate(&self, n: u32) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in &self.constraints {
            if c.bit == 0 || c.bit > n {
                return Err(Error::InvalidPattern(format!("bit {} outside 1..={n}", c.bit)));
            }
            if c.value > 1 {
                return Err(Error::InvalidPattern(format!("bit {} fixed to {}", c.bit, c.value)));
            }
            if !seen.insert(c.bit) {
                return Err(Error::InvalidPattern(format!("bit {} constrained twice", c.bit)));
            }
        }
        Ok(())
    }

    /// Bitmask of constrained positions and the required values, in the
    /// integer layout of [`BitIndex`].
    fn mask_value(&self, n: u32) -> (u64, u64) {
        self.constraints.iter().fold((0, 0), |(mask, value), c| {
            let shift = n - c.bit;
            (mask | 1 << shift, value | u64::from(c.value) << shift)
        })
    }

    /// Entry `A[i, z]`.
    pub fn matches(&self, z: BitIndex) -> bool {
        self.constraints.iter().all(|c| z.bit(c.bit) == c.value)
    }
}

/// `pattern_matches(p, z)`: whether `z` satisfies every constraint of `p`.
pub fn pattern_matches(p: &Pattern, z: BitIndex) -> bool {
    p.matches(z)
}

/// An ordered list of patterns over a common bit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternFile", into = "PatternFile")]
pub struct MeasurementSet {
    n: u32,
    patterns: Vec<Pattern>,
    masks: Vec<(u64, u64)>,
}

impl MeasurementSet {
    pub fn new(n: u32, patterns: Vec<Pattern>) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::InvalidSize(format!("bit count {n} outside 1..={MAX_BITS}")));
        }
        if patterns.is_empty() {
            return Err(Error::InvalidSize("a measurement set needs at least one pattern".into()));
        }
        for p in &patterns {
            p.validate(n)?;
        }
        let masks = patterns.iter().map(|p| p.mask_value(n)).collect();
        Ok(Self { n, patterns, masks })
    }

    /// All four value assignments of every adjacent bit pair, pair-major.
    pub fn nearest_neighbor(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("nearest-neighbour patterns need n >= 2, got {n}")));
        }
        let patterns = (1..n)
            .flat_map(|i| {
                (0..4u8).map(move |combo| Pattern::new([(i, combo >> 1), (i + 1, combo & 1)]))
            })
            .collect();
        Self::new(n, patterns)
    }

    /// `q` distinct position quadruplets drawn uniformly, each expanded into
    /// its 16 value assignments (first position most significant).
    pub fn random_quadruplets(n: u32, q: usize, seed: u64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidSize(format!("quadruplet patterns need n >= 4, got {n}")));
        }
        if q == 0 {
            return Err(Error::InvalidSize("quadruplet count must be at least 1".into()));
        }
        let quads = combinations4(n);
        if q > quads.len() {
            return Err(Error::Exhausted { n, requested: q, available: quads.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks = index::sample(&mut rng, quads.len(), q);
        let mut patterns = Vec::with_capacity(16 * q);
        for idx in picks {
            let quad = quads[idx];
            for combo in 0..16u8 {
                patterns.push(Pattern::new(
                    quad.iter().enumerate().map(|(j, &bit)| (bit, (combo >> (3 - j)) & 1)),
                ));
            }
        }
        Self::new(n, patterns)
    }

    /// Every point mass: `2^n` patterns fixing all bits. Row `i` fixes the
    /// bits of index `i`, so the measurement matrix is the identity.
    pub fn all_bits_fixed(n: u32) -> Result<Self> {
        if n > 16 {
            return Err(Error::Capacity { n, limit: 16 });
        }
        let patterns = (0..1u64 << n)
            .map(|z| Pattern::new((1..=n).map(|j| (j, ((z >> (n - j)) & 1) as u8))))
            .collect();
        Self::new(n, patterns)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn max_k(&self) -> usize {
        self.patterns.iter().map(Pattern::k).max().unwrap_or(0)
    }

    /// Constrained-bit mask and required values of pattern `i`.
    pub fn mask(&self, i: usize) -> (u64, u64) {
        self.masks[i]
    }

    /// Entry `A[i, z]`.
    #[inline]
    pub fn matches(&self, i: usize, z: u64) -> bool {
        let (mask, value) = self.masks[i];
        z & mask == value
    }

    /// `y = A x`, computed spike by spike.
    pub fn measure(&self, signal: &SparseSignal) -> Result<Marginals> {
        if signal.n() != self.n {
            return Err(Error::Shape(format!(
                "signal has n = {} but patterns have n = {}",
                signal.n(),
                self.n
            )));
        }
        let values = self
            .masks
            .iter()
            .map(|&(mask, value)| {
                signal
                    .spikes()
                    .iter()
                    .filter(|s| s.position.value() & mask == value)
                    .map(|s| s.value)
                    .sum()
            })
            .collect();
        Ok(Marginals(values))
    }

    /// Signed `(A^T r)_z`.
    pub fn column_dot(&self, z: BitIndex, r: &Marginals) -> f64 {
        self.check_index(z);
        assert_eq!(r.len(), self.len(), "residual length does not match pattern count");
        self.column_dot_raw(z.value(), &r.0)
    }

    #[inline]
    pub(crate) fn column_dot_raw(&self, z: u64, r: &[f64]) -> f64 {
        self.masks
            .iter()
            .zip(r)
            .filter(|((mask, value), _)| z & mask == *value)
            .map(|(_, ri)| ri)
            .sum()
    }

    /// Squared norm of column `z`, i.e. the number of patterns it satisfies.
    pub fn column_norm_sq(&self, z: BitIndex) -> f64 {
        self.check_index(z);
        (0..self.len()).filter(|&i| self.matches(i, z.value())).count() as f64
    }

    fn check_index(&self, z: BitIndex) {
        assert_eq!(z.n(), self.n, "index has {} bits, patterns expect {}", z.n(), self.n);
    }

    pub(crate) fn check_residual(&self, r: &Marginals) -> Result<()> {
        if r.len() != self.len() {
            return Err(Error::Shape(format!(
                "residual has {} entries for {} patterns",
                r.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

fn combinations4(n: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for d in c + 1..=n {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

pub fn nearest_neighbor_patterns(n: u32) -> Result<MeasurementSet> {
    MeasurementSet::nearest_neighbor(n)
}

pub fn random_quadruplet_patterns(n: u32, q: usize, seed: u64) -> Result<MeasurementSet> {
    MeasurementSet::random_quadruplets(n, q, seed)
}

pub fn measure(signal: &SparseSignal, ms: &MeasurementSet) -> Result<Marginals> {
    ms.measure(signal)
}

pub fn column_dot(z: BitIndex, r: &Marginals, ms: &MeasurementSet) -> f64 {
    ms.column_dot(z, r)
}

pub fn column_norm_sq(z: BitIndex, ms: &MeasurementSet) -> f64 {
    ms.column_norm_sq(z)
}

/// Default quadruplet count for `n` bits: enough for the pattern count to
/// slightly exceed the nearest-neighbour census.
pub fn default_quadruplets(n: u32) -> usize {
    (4 * (n as usize).saturating_sub(1)).div_ceil(16) + 1
}

/// Measurement outputs, aligned with the pattern order. Residuals share the
/// same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Marginals(pub Vec<f64>);

impl Marginals {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Serialize, Deserialize)]
struct PatternFile {
    n: u32,
    patterns: Vec<Vec<Constraint>>,
}

impl TryFrom<PatternFile> for MeasurementSet {
    type Error = Error;

    fn try_from(f: PatternFile) -> Result<Self> {
        MeasurementSet::new(f.n, f.patterns.into_iter().map(|constraints| Pattern { constraints }).collect())
    }
}

impl From<MeasurementSet> for PatternFile {
    fn from(ms: MeasurementSet) -> Self {
        PatternFile {
            n: ms.n,
            patterns: ms.patterns.into_iter().map(|p| p.constraints).collect(),
        }
    }
}

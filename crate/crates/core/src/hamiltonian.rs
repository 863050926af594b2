//! Generalized Ising Hamiltonians `H = A^T r` as weighted Pauli-Z strings.
//!
//! Spin convention: the Z eigenvalue of bit `b` is `1 - 2b`, so bit 0 maps
//! to +1 and bit 1 to -1. A pattern bit fixed to 0 contributes `(I + Z)/2`,
//! fixed to 1 contributes `(I - Z)/2`, free bits contribute `I`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::measurement::{Marginals, MeasurementSet};
use crate::signal::BitIndex;
use crate::{Error, Result, DENSE_LIMIT};

/// Coefficients below this magnitude are dropped after merging.
pub const DROP_TOLERANCE: f64 = 1e-15;

/// A single `coeff * Z_{i1} Z_{i2} ...` term; an empty support is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub support: Vec<u32>,
    pub coeff: f64,
}

/// Supports are stored as bitmasks in the same layout as [`BitIndex`]
/// values: qubit `j` is bit `n - j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    n: u32,
    terms: BTreeMap<u64, f64>,
}

impl IsingHamiltonian {
    pub fn new(n: u32) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn from_terms(n: u32, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut h = Self::new(n);
        for (support, coeff) in terms {
            h.add_term(&support, coeff)?;
        }
        h.prune();
        Ok(h)
    }

    /// Adds `coeff` to the term on `support`, merging with an existing one.
    pub fn add_term(&mut self, support: &[u32], coeff: f64) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::Config(format!("non-finite coefficient {coeff}")));
        }
        let mut mask = 0u64;
        for &q in support {
            if q == 0 || q > self.n {
                return Err(Error::InvalidSize(format!("qubit {q} outside 1..={}", self.n)));
            }
            let bit = 1u64 << (self.n - q);
            if mask & bit != 0 {
                return Err(Error::InvalidSize(format!("qubit {q} repeated in support")));
            }
            mask |= bit;
        }
        *self.terms.entry(mask).or_insert(0.0) += coeff;
        Ok(())
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() >= DROP_TOLERANCE);
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the term on `support` (0 if absent).
    pub fn coeff(&self, support: &[u32]) -> f64 {
        let mask = support.iter().fold(0u64, |m, &q| m | 1 << (self.n - q));
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    pub(crate) fn masked_terms(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn support_of(&self, mask: u64) -> Vec<u32> {
        (1..=self.n).filter(|&q| mask >> (self.n - q) & 1 == 1).collect()
    }

    /// Terms ordered by support size, then lexicographically by qubit.
    pub fn terms(&self) -> Vec<PauliTerm> {
        let mut out: Vec<PauliTerm> = self
            .terms
            .iter()
            .map(|(&m, &coeff)| PauliTerm { support: self.support_of(m), coeff })
            .collect();
        out.sort_by(|a, b| a.support.len().cmp(&b.support.len()).then_with(|| a.support.cmp(&b.support)));
        out
    }

    pub fn max_support(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    /// Diagonal entry `h(z)`.
    pub fn evaluate(&self, z: BitIndex) -> f64 {
        assert_eq!(z.n(), self.n, "index has {} bits, hamiltonian has {}", z.n(), self.n);
        self.evaluate_raw(z.value())
    }

    #[inline]
    pub(crate) fn evaluate_raw(&self, z: u64) -> f64 {
        self.terms
            .iter()
            .map(|(&mask, &c)| if (z & mask).count_ones().is_multiple_of(2) { c } else { -c })
            .sum()
    }

    /// Full diagonal, indexed by `z`.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::Capacity { n: self.n, limit: DENSE_LIMIT });
        }
        Ok((0..1u64 << self.n).map(|z| self.evaluate_raw(z)).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(&m, &c)| (m, c * factor)).collect(),
        }
    }

    /// Term-wise sum.
    pub fn merged(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(format!("adding {}-qubit and {}-qubit hamiltonians", self.n, other.n)));
        }
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            *out.terms.entry(m).or_insert(0.0) += c;
        }
        out.prune();
        Ok(out)
    }

    /// Only identity, single-site, and adjacent-pair terms.
    pub fn is_chain(&self) -> bool {
        self.terms.keys().all(|&m| match m.count_ones() {
            0 | 1 => true,
            2 => (m >> m.trailing_zeros()) == 0b11,
            _ => false,
        })
    }

    /// One line per term: the coefficient, then `Z<q>` for each qubit.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in self.terms() {
            let _ = write!(out, "{:+.15e}", t.coeff);
            if !t.support.is_empty() {
                out.push(' ');
                for q in &t.support {
                    let _ = write!(out, " Z{q}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Expands `sum_i r_i a_i` into Pauli-Z strings in `O(M 2^k)`.
pub fn build_hamiltonian(ms: &MeasurementSet, r: &Marginals) -> Result<IsingHamiltonian> {
    ms.check_residual(r)?;
    let mut h = IsingHamiltonian::new(ms.n());
    for (i, &ri) in r.values().iter().enumerate() {
        if ri == 0.0 {
            continue;
        }
        let (mask, ones) = ms.mask(i);
        let scale = ri / f64::from(1u32 << mask.count_ones());
        // Walk every subset of the constrained bits; each fixed-to-1 bit in
        // the subset flips the sign.
        let mut sub = mask;
        loop {
            let c = if (sub & ones).count_ones() % 2 == 0 { scale } else { -scale };
            *h.terms.entry(sub).or_insert(0.0) += c;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
    }
    h.prune();
    Ok(h)
}

pub fn evaluate(h: &IsingHamiltonian, z: BitIndex) -> f64 {
    h.evaluate(z)
}

//! Support detection: `argmax_z |(A^T r)_z|` with three backends.
//!
//! Every backend reports the score as `|column_dot|` at the returned
//! position, recomputed independently of how the position was found. Ties
//! go to the smallest index.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::hamiltonian::{build_hamiltonian, IsingHamiltonian};
use crate::measurement::{Marginals, MeasurementSet};
use crate::qaoa::{self, OptimizerConfig};
use crate::signal::BitIndex;
use crate::{Error, Result, DENSE_LIMIT};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub position: BitIndex,
    /// `|(A^T r)_position|`.
    pub score: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl SolverOutcome {
    fn at(ms: &MeasurementSet, r: &Marginals, z: u64) -> Self {
        Self {
            position: BitIndex::new_unchecked(ms.n(), z),
            score: ms.column_dot_raw(z, r.values()).abs(),
            diagnostics: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaoaSolverConfig {
    pub depth: usize,
    pub restarts: usize,
    pub max_evals: usize,
    pub shots: usize,
    pub seed: u64,
}

impl Default for QaoaSolverConfig {
    fn default() -> Self {
        Self { depth: 1, restarts: 10, max_evals: 200, shots: 1024, seed: 0 }
    }
}

/// Backend selector. Selection is explicit: a chain solver on a non-chain
/// instance is an error, not a silent fallback.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum SolverSpec {
    BruteForce,
    ChainDp,
    Qaoa(QaoaSolverConfig),
}

impl SolverSpec {
    /// Runs the backend. `call` distinguishes repeated calls (pursuit
    /// iterations) so stochastic backends draw fresh randomness each time.
    pub fn solve(&self, ms: &MeasurementSet, r: &Marginals, call: u64) -> Result<SolverOutcome> {
        match self {
            SolverSpec::BruteForce => brute_force_solve(ms, r),
            SolverSpec::ChainDp => chain_dp_solve(ms, r),
            SolverSpec::Qaoa(cfg) => {
                let cfg = QaoaSolverConfig { seed: mix_seed(cfg.seed, call), ..*cfg };
                qaoa_solve(ms, r, &cfg)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverSpec::BruteForce => "brute",
            SolverSpec::ChainDp => "chain",
            SolverSpec::Qaoa(_) => "qaoa",
        }
    }
}

/// SplitMix64 finaliser over `seed + stream`.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exhaustive scan of all `2^n` columns.
pub fn brute_force_solve(ms: &MeasurementSet, r: &Marginals) -> Result<SolverOutcome> {
    ms.check_residual(r)?;
    let n = ms.n();
    if n > DENSE_LIMIT {
        return Err(Error::Capacity { n, limit: DENSE_LIMIT });
    }
    let mut best = (0u64, f64::NEG_INFINITY);
    for z in 0..1u64 << n {
        let score = ms.column_dot_raw(z, r.values()).abs();
        if score > best.1 {
            best = (z, score);
        }
    }
    let mut out = SolverOutcome::at(ms, r, best.0);
    out.diagnostics.insert("columns_scanned".into(), (1u64 << n) as f64);
    Ok(out)
}

/// Exact optimum of a nearest-neighbour chain Hamiltonian in `O(n)`.
///
/// One pass maximises `h`, one minimises it; the extremum with the larger
/// magnitude wins, the maximum on a tie.
pub fn chain_dp_solve(ms: &MeasurementSet, r: &Marginals) -> Result<SolverOutcome> {
    let h = build_hamiltonian(ms, r)?;
    let chain = Chain::from_hamiltonian(&h)?;
    let z_max = chain.optimum(1.0);
    let z_min = chain.optimum(-1.0);
    let h_max = ms.column_dot_raw(z_max, r.values());
    let h_min = ms.column_dot_raw(z_min, r.values());
    let mut out = SolverOutcome::at(ms, r, if h_max.abs() >= h_min.abs() { z_max } else { z_min });
    out.diagnostics.insert("h_max".into(), h_max);
    out.diagnostics.insert("h_min".into(), h_min);
    Ok(out)
}

/// `h(s) = sum_i field[i] s_i + sum_i coupling[i] s_i s_{i+1}` with
/// `s_i = 1 - 2 b_i`; the identity term does not move the optimum.
struct Chain {
    n: usize,
    field: Vec<f64>,
    coupling: Vec<f64>,
}

impl Chain {
    fn from_hamiltonian(h: &IsingHamiltonian) -> Result<Self> {
        let n = h.n() as usize;
        let mut chain = Chain { n, field: vec![0.0; n], coupling: vec![0.0; n.saturating_sub(1)] };
        for (mask, c) in h.masked_terms() {
            let support = h.support_of(mask);
            match support.as_slice() {
                [] => {}
                [q] => chain.field[*q as usize - 1] += c,
                [a, b] if b - a == 1 => chain.coupling[*a as usize - 1] += c,
                _ => return Err(Error::NotChain(support)),
            }
        }
        Ok(chain)
    }

    /// Index optimising `sign * h`; smallest index among exact ties.
    fn optimum(&self, sign: f64) -> u64 {
        let spin = |b: usize| 1.0 - 2.0 * b as f64;
        let n = self.n;
        // suffix[i][b]: best value of sites i.. given site i holds bit b.
        let mut suffix = vec![[0.0f64; 2]; n];
        for i in (0..n).rev() {
            for b in 0..2 {
                let local = sign * self.field[i] * spin(b);
                let tail = if i + 1 < n {
                    (0..2)
                        .map(|nb| sign * self.coupling[i] * spin(b) * spin(nb) + suffix[i + 1][nb])
                        .fold(f64::NEG_INFINITY, f64::max)
                } else {
                    0.0
                };
                suffix[i][b] = local + tail;
            }
        }
        // Walk forward from the most significant bit, preferring 0.
        let mut z = 0u64;
        let mut prev = usize::from(suffix[0][1] > suffix[0][0]);
        z = (z << 1) | prev as u64;
        for i in 1..n {
            let value = |b: usize| sign * self.coupling[i - 1] * spin(prev) * spin(b) + suffix[i][b];
            let b = usize::from(value(1) > value(0));
            z = (z << 1) | b as u64;
            prev = b;
        }
        z
    }
}

/// QAOA support detection: optimise the ansatz for `H` and for `-H`, pool
/// the sampled bitstrings, and keep the one with the largest `|column_dot|`.
/// Approximate: only the reported score at the returned position is exact.
pub fn qaoa_solve(ms: &MeasurementSet, r: &Marginals, cfg: &QaoaSolverConfig) -> Result<SolverOutcome> {
    let h = build_hamiltonian(ms, r)?;
    let opt = |seed| OptimizerConfig { restarts: cfg.restarts, max_evals: cfg.max_evals, seed };
    let mut candidates = BTreeSet::new();
    let mut diagnostics = BTreeMap::new();
    let mut evaluations = 0;
    for (k, (label, target)) in [("max", h.clone()), ("min", h.scaled(-1.0))].into_iter().enumerate() {
        let run = qaoa::optimize(&target, cfg.depth.max(1), &opt(mix_seed(cfg.seed, 2 * k as u64)))?;
        evaluations += run.evaluations;
        let state = qaoa::ansatz_state(&target, &run.params)?;
        let shots = state.sample(cfg.shots.max(1), mix_seed(cfg.seed, 2 * k as u64 + 1));
        candidates.extend(shots.into_iter().map(|z| z.value()));
        diagnostics.insert(format!("expectation_{label}"), run.expectation);
    }
    let mut best = (0u64, f64::NEG_INFINITY);
    for &z in &candidates {
        let score = ms.column_dot_raw(z, r.values()).abs();
        if score > best.1 {
            best = (z, score);
        }
    }
    let mut out = SolverOutcome::at(ms, r, best.0);
    diagnostics.insert("evaluations".into(), evaluations as f64);
    diagnostics.insert("candidates".into(), candidates.len() as f64);
    out.diagnostics = diagnostics;
    Ok(out)
}

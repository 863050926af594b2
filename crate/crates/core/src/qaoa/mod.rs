//! Statevector QAOA for diagonal Hamiltonians.
//!
//! The ansatz starts from the uniform superposition and alternates
//! `exp(i gamma_l H)` with `exp(i beta_l sum_j X_j)`. Phase layers are applied
//! exactly per basis state; the gate decomposition in [`gates`] reproduces
//! them and is used for verification and export.

pub mod gates;
pub mod nelder_mead;
mod state;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::IsingHamiltonian;
use crate::signal::BitIndex;
use crate::{Error, Result};

pub use gates::{ansatz_circuit, decompose_evolution, simulate_gates, Gate, GateList};
pub use nelder_mead::NelderMead;
pub use state::StateVector;

/// Layer angles; `gammas[l]` and `betas[l]` drive layer `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(Error::Config(format!(
                "need equal, nonzero numbers of angles (got {} gammas, {} betas)",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(Self { gammas, betas })
    }

    pub fn zeros(p: usize) -> Self {
        Self { gammas: vec![0.0; p], betas: vec![0.0; p] }
    }

    pub fn depth(&self) -> usize {
        self.gammas.len()
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.depth()
    }

    /// Appends `extra` zero layers, which leave the prepared state unchanged.
    pub fn padded(&self, extra: usize) -> Self {
        let mut out = self.clone();
        out.gammas.extend(std::iter::repeat_n(0.0, extra));
        out.betas.extend(std::iter::repeat_n(0.0, extra));
        out
    }

    fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    fn from_flat(x: &[f64]) -> Self {
        let (g, b) = x.split_at(x.len() / 2);
        Self { gammas: g.to_vec(), betas: b.to_vec() }
    }
}

/// Depth used for a given free-parameter count: `ceil(count / 2)`.
pub fn depth_for_parameter_count(count: usize) -> usize {
    count.div_ceil(2).max(1)
}

pub fn uniform_state(n: u32) -> Result<StateVector> {
    StateVector::uniform(n)
}

pub fn ansatz_state(h: &IsingHamiltonian, params: &QaoaParams) -> Result<StateVector> {
    let diagonal = h.diagonal()?;
    let mut state = StateVector::uniform(h.n())?;
    prepare(&mut state, &diagonal, params);
    Ok(state)
}

fn prepare(state: &mut StateVector, diagonal: &[f64], params: &QaoaParams) {
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        state.apply_phase_diagonal(diagonal, gamma);
        state.apply_mixer_layer(beta);
    }
}

pub fn expectation(state: &StateVector, h: &IsingHamiltonian) -> f64 {
    state.expectation(h)
}

pub fn sample_candidates(state: &StateVector, shots: usize, seed: u64) -> Vec<BitIndex> {
    state.sample(shots, seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Independent simplex runs; the first starts from the warm start when
    /// one is given.
    pub restarts: usize,
    /// Evaluation budget per restart.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 10, max_evals: 200, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    pub params: QaoaParams,
    /// `<psi(params)|H|psi(params)>` at the returned angles.
    pub expectation: f64,
    pub evaluations: usize,
}

/// Maximises the ansatz expectation of `h` at depth `p` from uniformly
/// random starts in `[0, 2pi)^(2p)`.
pub fn optimize(h: &IsingHamiltonian, p: usize, cfg: &OptimizerConfig) -> Result<OptimizeOutcome> {
    if p == 0 {
        return Err(Error::Config("QAOA depth must be at least 1".into()));
    }
    run_restarts(h, p, None, cfg)
}

/// Like [`optimize`], with `init` as the first starting point.
pub fn optimize_from(h: &IsingHamiltonian, init: &QaoaParams, cfg: &OptimizerConfig) -> Result<OptimizeOutcome> {
    run_restarts(h, init.depth(), Some(init), cfg)
}

fn run_restarts(
    h: &IsingHamiltonian,
    p: usize,
    init: Option<&QaoaParams>,
    cfg: &OptimizerConfig,
) -> Result<OptimizeOutcome> {
    let diagonal = h.diagonal()?;
    let mut scratch = StateVector::uniform(h.n())?;
    let uniform = scratch.clone();
    let mut objective = |x: &[f64]| {
        scratch.clone_from(&uniform);
        prepare(&mut scratch, &diagonal, &QaoaParams::from_flat(x));
        -scratch.expectation_diagonal(&diagonal)
    };

    let nm = NelderMead { max_evals: cfg.max_evals.max(1), ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0;
    for restart in 0..cfg.restarts.max(1) {
        // Draw every restart's point, even when a warm start replaces the
        // first, so restart k sees the same stream regardless of `init`.
        let random: Vec<f64> = (0..2 * p).map(|_| rng.random_range(0.0..TAU)).collect();
        let start = match (restart, init) {
            (0, Some(params)) => params.to_flat(),
            _ => random,
        };
        let m = nm.minimize(&mut objective, &start);
        evaluations += m.evaluations;
        if best.as_ref().is_none_or(|(_, v)| m.value < *v) {
            best = Some((m.x, m.value));
        }
    }
    let (x, value) = best.expect("at least one restart");
    Ok(OptimizeOutcome { params: QaoaParams::from_flat(&x), expectation: -value, evaluations })
}

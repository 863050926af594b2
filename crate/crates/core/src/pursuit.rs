//! Matching pursuit with pluggable support detection.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::measurement::{Marginals, MeasurementSet};
use crate::signal::SparseSignal;
use crate::solvers::SolverSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitConfig {
    pub max_iterations: usize,
    /// Stop once `||r||_2` is at or below this.
    pub residual_tolerance: f64,
    /// Stop when the best `|(A^T r)_z|` is below this.
    pub min_score: f64,
    pub solver: SolverSpec,
    /// Wall-clock cap; reaching it ends the run with [`Termination::TimeLimit`].
    pub time_limit: Option<Duration>,
}

impl PursuitConfig {
    /// Defaults for a signal of the given sparsity: `4s` iterations,
    /// tolerance `1e-6 ||y||`, score floor `1e-9`.
    pub fn for_sparsity(sparsity: usize, y: &Marginals, solver: SolverSpec) -> Self {
        Self {
            max_iterations: 4 * sparsity.max(1),
            residual_tolerance: 1e-6 * y.norm(),
            min_score: 1e-9,
            solver,
            time_limit: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.residual_tolerance >= 0.0) || !(self.min_score >= 0.0) {
            return Err(Error::Config("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceMet,
    MaxIterations,
    ScoreFloor,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub position: u64,
    pub score: f64,
    pub coefficient: f64,
    /// `||r||_2` after this iteration's update.
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub recovered: SparseSignal,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    pub residual: Marginals,
}

/// Greedy recovery of `x` from `y = A x`.
///
/// Each iteration picks `z = argmax |(A^T r)_z|`, takes the least-squares
/// coefficient `c = (A^T r)_z / ||a_z||^2`, adds it to the estimate at `z`,
/// and subtracts `c a_z` from the residual. A position picked again
/// accumulates into its existing coefficient.
pub fn matching_pursuit(y: &Marginals, ms: &MeasurementSet, cfg: &PursuitConfig) -> Result<ReconstructionResult> {
    ms.check_residual(y)?;
    cfg.validate()?;
    let started = Instant::now();
    let mut r = y.clone();
    let mut norm = r.norm();
    let mut coefficients: BTreeMap<u64, f64> = BTreeMap::new();
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIterations;

    for iteration in 0..cfg.max_iterations {
        if norm <= cfg.residual_tolerance {
            termination = Termination::ToleranceMet;
            break;
        }
        if cfg.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
            termination = Termination::TimeLimit;
            break;
        }
        let pick = cfg.solver.solve(ms, &r, iteration as u64)?;
        if pick.score < cfg.min_score {
            termination = Termination::ScoreFloor;
            break;
        }
        let z = pick.position.value();
        let weight = ms.column_norm_sq(pick.position);
        if weight == 0.0 {
            return Err(Error::DegenerateColumn(z));
        }
        let coefficient = ms.column_dot(pick.position, &r) / weight;
        *coefficients.entry(z).or_insert(0.0) += coefficient;
        for (i, ri) in r.0.iter_mut().enumerate() {
            if ms.matches(i, z) {
                *ri -= coefficient;
            }
        }
        norm = r.norm();
        trace.push(IterationRecord { position: z, score: pick.score, coefficient, residual_norm: norm });
    }
    if termination == Termination::MaxIterations && norm <= cfg.residual_tolerance {
        termination = Termination::ToleranceMet;
    }

    let recovered = SparseSignal::new(ms.n(), coefficients.into_iter().filter(|(_, c)| *c != 0.0))?;
    Ok(ReconstructionResult { recovered, trace, termination, residual: r })
}

/// Every true spike position appears in the recovery with a coefficient of
/// magnitude at least `amplitude_floor`. Values are not compared, and extra
/// recovered positions are allowed.
pub fn recovery_success(truth: &SparseSignal, result: &ReconstructionResult, amplitude_floor: f64) -> bool {
    truth.n() == result.recovered.n()
        && truth.positions().all(|p| {
            result
                .recovered
                .value_at(p.value())
                .is_some_and(|c| c.abs() >= amplitude_floor)
        })
}

//! Seeded reconstruction studies: single trials and success-rate sweeps.
//!
//! Every trial seed is derived from the plan's master seed, and every random
//! input of a trial (signal, quadruplet choice, solver randomness) from the
//! trial seed. Configurations compared within one sweep therefore see the
//! same signals and, for the same pattern kind, the same measurements.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::measurement::{default_quadruplets, MeasurementSet};
use crate::pursuit::{matching_pursuit, recovery_success, PursuitConfig, ReconstructionResult, Termination};
use crate::qaoa::depth_for_parameter_count;
use crate::signal::{random_sparse_signal, SparseSignal};
use crate::solvers::{mix_seed, QaoaSolverConfig, SolverSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternKind {
    NearestNeighbor,
    Quadruplet { q: usize },
}

impl PatternKind {
    /// Quadruplets with the default count for `n`.
    pub fn quadruplets_for(n: u32) -> Self {
        PatternKind::Quadruplet { q: default_quadruplets(n) }
    }

    pub fn build(&self, n: u32, seed: u64) -> Result<MeasurementSet> {
        match *self {
            PatternKind::NearestNeighbor => MeasurementSet::nearest_neighbor(n),
            PatternKind::Quadruplet { q } => MeasurementSet::random_quadruplets(n, q, seed),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            PatternKind::NearestNeighbor => "nn",
            PatternKind::Quadruplet { .. } => "quad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum SolverChoice {
    Brute,
    Chain,
    Qaoa {
        /// Total free parameters; depth is `ceil(count / 2)`.
        param_count: usize,
        restarts: usize,
        max_evals: usize,
        shots: usize,
    },
}

impl SolverChoice {
    pub fn qaoa(param_count: usize) -> Self {
        let d = QaoaSolverConfig::default();
        SolverChoice::Qaoa { param_count, restarts: d.restarts, max_evals: d.max_evals, shots: d.shots }
    }

    fn spec(&self, seed: u64) -> SolverSpec {
        match *self {
            SolverChoice::Brute => SolverSpec::BruteForce,
            SolverChoice::Chain => SolverSpec::ChainDp,
            SolverChoice::Qaoa { param_count, restarts, max_evals, shots } => SolverSpec::Qaoa(QaoaSolverConfig {
                depth: depth_for_parameter_count(param_count),
                restarts,
                max_evals,
                shots,
                seed,
            }),
        }
    }

    fn label(&self) -> String {
        match self {
            SolverChoice::Brute => "brute".into(),
            SolverChoice::Chain => "chain".into(),
            SolverChoice::Qaoa { param_count, .. } => format!("qaoa{param_count}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub n: u32,
    pub sparsity: usize,
    pub trial_count: usize,
    pub patterns: PatternKind,
    pub solver: SolverChoice,
    pub master_seed: u64,
    pub amplitude_floor: f64,
    pub value_range: (f64, f64),
    /// Pursuit iteration budget; `4 * sparsity` when unset.
    pub max_iterations: Option<usize>,
    /// Per-trial wall-clock cap in seconds; capped trials count as failures.
    pub trial_time_limit: f64,
    /// Worker threads for trials; rayon's default when unset.
    pub workers: Option<usize>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            n: 6,
            sparsity: 3,
            trial_count: 100,
            patterns: PatternKind::NearestNeighbor,
            solver: SolverChoice::Chain,
            master_seed: 0,
            amplitude_floor: 1e-6,
            value_range: (0.1, 1.0),
            max_iterations: None,
            trial_time_limit: 60.0,
            workers: None,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trial_count == 0 {
            return Err(Error::Config("trial_count must be at least 1".into()));
        }
        if self.sparsity == 0 || (self.n < 64 && self.sparsity as u64 > 1u64 << self.n) {
            return Err(Error::InvalidSparsity { n: self.n, s: self.sparsity });
        }
        if let SolverChoice::Qaoa { param_count: 0, .. } = self.solver {
            return Err(Error::Config("parameter count must be at least 1".into()));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.trial_time_limit > 0.0) {
            return Err(Error::Config("trial_time_limit must be positive".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.solver.label(), self.patterns.tag())
    }

    /// Seed of trial `k`.
    pub fn trial_seed(&self, k: usize) -> u64 {
        mix_seed(self.master_seed, k as u64)
    }

    pub fn with(&self, patterns: PatternKind, solver: SolverChoice) -> Self {
        Self { patterns, solver, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub signal: SparseSignal,
    pub result: ReconstructionResult,
    pub success: bool,
}

/// Generates the signal and measurements for one trial, reconstructs, and
/// scores the result.
pub fn run_single(plan: &ExperimentPlan, trial_seed: u64) -> Result<TrialOutcome> {
    plan.validate()?;
    let signal = random_sparse_signal(plan.n, plan.sparsity, plan.value_range, mix_seed(trial_seed, 0))?;
    let ms = plan.patterns.build(plan.n, mix_seed(trial_seed, 1))?;
    let y = ms.measure(&signal)?;
    let mut cfg = PursuitConfig::for_sparsity(plan.sparsity, &y, plan.solver.spec(mix_seed(trial_seed, 2)));
    if let Some(m) = plan.max_iterations {
        cfg.max_iterations = m;
    }
    cfg.time_limit = Some(Duration::from_secs_f64(plan.trial_time_limit));
    let result = matching_pursuit(&y, &ms, &cfg)?;
    let success = result.termination != Termination::TimeLimit
        && recovery_success(&signal, &result, plan.amplitude_floor);
    Ok(TrialOutcome { signal, result, success })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub iterations: usize,
    pub termination: Termination,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessReport {
    pub label: String,
    pub plan: ExperimentPlan,
    pub records: Vec<TrialRecord>,
    pub successes: usize,
    pub rate: f64,
}

impl SuccessReport {
    pub fn successes_on(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.success).collect()
    }
}

/// Runs every trial of `plan`, in parallel up to `plan.workers`.
pub fn run_plan(plan: &ExperimentPlan) -> Result<SuccessReport> {
    run_labelled(plan, plan.label())
}

fn run_labelled(plan: &ExperimentPlan, label: String) -> Result<SuccessReport> {
    plan.validate()?;
    let work = || {
        (0..plan.trial_count)
            .into_par_iter()
            .map(|trial| {
                let seed = plan.trial_seed(trial);
                let started = Instant::now();
                let out = run_single(plan, seed)?;
                Ok(TrialRecord {
                    trial,
                    seed,
                    success: out.success,
                    iterations: out.result.trace.len(),
                    termination: out.result.termination,
                    runtime_ms: started.elapsed().as_secs_f64() * 1e3,
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    let records = match plan.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let successes = records.iter().filter(|r| r.success).count();
    Ok(SuccessReport {
        label,
        plan: plan.clone(),
        rate: successes as f64 / records.len() as f64,
        records,
        successes,
    })
}

/// Success rates across QAOA parameter counts on shared trials.
///
/// The first report is the classical reference (chain DP on nearest-neighbour
/// patterns), the second the brute-force solver on the plan's pattern kind,
/// followed by one QAOA report per entry of `parameter_counts`. QAOA budget
/// settings come from `plan.solver` when it is a QAOA choice.
pub fn run_sweep(plan: &ExperimentPlan, parameter_counts: &[usize]) -> Result<Vec<SuccessReport>> {
    if parameter_counts.contains(&0) {
        return Err(Error::Config("parameter counts must be at least 1".into()));
    }
    let mut reports = vec![
        run_labelled(&plan.with(PatternKind::NearestNeighbor, SolverChoice::Chain), "baseline-chain-nn".into())?,
        run_plan(&plan.with(plan.patterns, SolverChoice::Brute))?,
    ];
    for &count in parameter_counts {
        let solver = match plan.solver {
            SolverChoice::Qaoa { restarts, max_evals, shots, .. } => {
                SolverChoice::Qaoa { param_count: count, restarts, max_evals, shots }
            }
            _ => SolverChoice::qaoa(count),
        };
        reports.push(run_plan(&plan.with(plan.patterns, solver))?);
    }
    Ok(reports)
}

pub const CSV_HEADER: [&str; 7] = ["config", "trial", "seed", "success", "iterations", "termination", "runtime_ms"];

/// One row per (config, trial), then an aggregate row per config with
/// `trial = "all"`, the success count in `iterations` and the rate in
/// `success`. Runtimes are left blank when `include_timing` is false so the
/// output is reproducible byte for byte.
pub fn write_csv<W: Write>(reports: &[SuccessReport], out: W, include_timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for report in reports {
        for r in &report.records {
            let runtime = if include_timing { format!("{:.3}", r.runtime_ms) } else { String::new() };
            w.write_record([
                report.label.clone(),
                r.trial.to_string(),
                r.seed.to_string(),
                u8::from(r.success).to_string(),
                r.iterations.to_string(),
                serde_json::to_value(r.termination)?.as_str().unwrap_or_default().to_string(),
                runtime,
            ])?;
        }
        let total: f64 = report.records.iter().map(|r| r.runtime_ms).sum();
        w.write_record([
            report.label.clone(),
            "all".into(),
            report.plan.master_seed.to_string(),
            format!("{}", report.rate),
            report.successes.to_string(),
            String::new(),
            if include_timing { format!("{total:.3}") } else { String::new() },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qcsense::experiment::{run_plan, run_sweep, write_csv, ExperimentPlan, PatternKind, SolverChoice};
use qcsense::hamiltonian::build_hamiltonian;
use qcsense::measurement::default_quadruplets;
use qcsense::qaoa::{ansatz_circuit, depth_for_parameter_count, QaoaParams};
use qcsense::signal::random_sparse_signal;
use qcsense::solvers::QaoaSolverConfig;
use qcsense::{matching_pursuit, Marginals, MeasurementSet, PursuitConfig, SolverSpec, SparseSignal};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "qcsense", version, about = "Sparse signal recovery from binary marginals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random sparse signal.
    Generate(GenerateArgs),
    /// Build a measurement pattern set.
    Patterns(PatternArgs),
    /// Compute the marginals of a signal.
    Measure(MeasureArgs),
    /// Recover a signal from marginals by matching pursuit.
    Reconstruct(ReconstructArgs),
    /// Run success-rate trials from flags or a plan file.
    Experiment(ExperimentArgs),
    /// Dump the Ising Hamiltonian of a residual.
    Hamiltonian(HamiltonianArgs),
    /// Export the gate list of a QAOA ansatz.
    Circuit(CircuitArgs),
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    sparsity: usize,
    #[arg(long, default_value_t = 0.1)]
    min_value: f64,
    #[arg(long, default_value_t = 1.0)]
    max_value: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternChoice {
    Nn,
    Quad,
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value = "nn")]
    patterns: PatternChoice,
    /// Quadruplet count; defaults to ceil(4(n-1)/16) + 1.
    #[arg(long)]
    quadruplets: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    signal: PathBuf,
    #[arg(long = "pattern-set")]
    pattern_set: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverName {
    Brute,
    Chain,
    Qaoa,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "chain")]
    solver: SolverName,
    /// Total QAOA parameters; depth is ceil(COUNT / 2).
    #[arg(long = "params", value_name = "COUNT", default_value_t = 2)]
    params: usize,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Objective evaluations per optimizer restart.
    #[arg(long, default_value_t = 200)]
    max_evals: usize,
    #[arg(long, default_value_t = 1024)]
    shots: usize,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    marginals: PathBuf,
    #[arg(long = "pattern-set")]
    pattern_set: PathBuf,
    /// Expected sparsity; sets the iteration budget to 4 * sparsity.
    #[arg(long, default_value_t = 3)]
    sparsity: usize,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON plan; flags given alongside override its fields.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    sparsity: Option<usize>,
    #[arg(long, value_enum)]
    patterns: Option<PatternChoice>,
    #[arg(long)]
    quadruplets: Option<usize>,
    #[arg(long, value_enum)]
    solver: Option<SolverName>,
    #[arg(long = "params", value_name = "COUNT")]
    params: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Compare against the chain baseline over these QAOA parameter counts.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Leave runtimes out of the report.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HamiltonianArgs {
    #[arg(long)]
    marginals: PathBuf,
    #[arg(long = "pattern-set")]
    pattern_set: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long)]
    marginals: PathBuf,
    #[arg(long = "pattern-set")]
    pattern_set: PathBuf,
    /// Phase angles, one per layer.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    gammas: Vec<f64>,
    /// Mixer angles, one per layer.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    betas: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("cannot parse {}", path.display()))
}

fn sink(out: &Output) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: serde::Serialize>(value: &T, out: &Output) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn emit_text(text: &str, out: &Output) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn pattern_kind(choice: PatternChoice, n: u32, q: Option<usize>) -> PatternKind {
    match choice {
        PatternChoice::Nn => PatternKind::NearestNeighbor,
        PatternChoice::Quad => PatternKind::Quadruplet { q: q.unwrap_or_else(|| default_quadruplets(n)) },
    }
}

fn measured(marginals: &Path, pattern_set: &Path) -> anyhow::Result<(Marginals, MeasurementSet)> {
    let ms: MeasurementSet = read_json(pattern_set)?;
    let y: Marginals = read_json(marginals)?;
    if y.values().len() != ms.len() {
        bail!("{} marginals for {} patterns", y.values().len(), ms.len());
    }
    Ok((y, ms))
}

fn generate(a: GenerateArgs) -> anyhow::Result<()> {
    let x = random_sparse_signal(a.n, a.sparsity, (a.min_value, a.max_value), a.seed)?;
    emit_json(&x, &a.output)
}

fn patterns(a: PatternArgs) -> anyhow::Result<()> {
    let ms = pattern_kind(a.patterns, a.n, a.quadruplets).build(a.n, a.seed)?;
    emit_json(&ms, &a.output)
}

fn measure(a: MeasureArgs) -> anyhow::Result<()> {
    let x: SparseSignal = read_json(&a.signal)?;
    let ms: MeasurementSet = read_json(&a.pattern_set)?;
    emit_json(&ms.measure(&x)?, &a.output)
}

fn reconstruct(a: ReconstructArgs) -> anyhow::Result<()> {
    let (y, ms) = measured(&a.marginals, &a.pattern_set)?;
    let s = &a.solver;
    let solver = match s.solver {
        SolverName::Brute => SolverSpec::BruteForce,
        SolverName::Chain => SolverSpec::ChainDp,
        SolverName::Qaoa => {
            if s.params == 0 {
                bail!("--params must be at least 1");
            }
            SolverSpec::Qaoa(QaoaSolverConfig {
                depth: depth_for_parameter_count(s.params),
                restarts: s.restarts,
                max_evals: s.max_evals,
                shots: s.shots,
                seed: a.seed,
            })
        }
    };
    let mut cfg = PursuitConfig::for_sparsity(a.sparsity, &y, solver);
    if let Some(m) = a.max_iterations {
        cfg.max_iterations = m;
    }
    emit_json(&matching_pursuit(&y, &ms, &cfg)?, &a.output)
}

fn experiment_plan(a: &ExperimentArgs) -> anyhow::Result<ExperimentPlan> {
    let mut plan = match &a.plan {
        Some(path) => read_json(path)?,
        None => ExperimentPlan::default(),
    };
    if let Some(n) = a.n {
        plan.n = n;
    }
    if let Some(s) = a.sparsity {
        plan.sparsity = s;
    }
    match (a.patterns, a.quadruplets) {
        (Some(p), q) => plan.patterns = pattern_kind(p, plan.n, q),
        (None, Some(q)) => plan.patterns = PatternKind::Quadruplet { q },
        (None, None) => {}
    }
    if let Some(t) = a.trials {
        plan.trial_count = t;
    }
    if let Some(seed) = a.seed {
        plan.master_seed = seed;
    }
    if a.workers.is_some() {
        plan.workers = a.workers;
    }
    let wants_qaoa = matches!(a.solver, Some(SolverName::Qaoa))
        || (a.solver.is_none() && matches!(plan.solver, SolverChoice::Qaoa { .. }));
    plan.solver = match a.solver {
        Some(SolverName::Brute) => SolverChoice::Brute,
        Some(SolverName::Chain) => SolverChoice::Chain,
        _ if wants_qaoa || !a.sweep.is_empty() => {
            let base = match plan.solver {
                SolverChoice::Qaoa { .. } => plan.solver,
                _ => SolverChoice::qaoa(2),
            };
            let SolverChoice::Qaoa { param_count, restarts, max_evals, shots } = base else { unreachable!() };
            SolverChoice::Qaoa {
                param_count: a.params.unwrap_or(param_count),
                restarts: a.restarts.unwrap_or(restarts),
                max_evals: a.max_evals.unwrap_or(max_evals),
                shots: a.shots.unwrap_or(shots),
            }
        }
        _ => plan.solver,
    };
    plan.validate()?;
    Ok(plan)
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<()> {
    let plan = experiment_plan(&a)?;
    let reports = if a.sweep.is_empty() { vec![run_plan(&plan)?] } else { run_sweep(&plan, &a.sweep)? };
    match a.format {
        Format::Json => {
            let mut value = serde_json::to_value(&reports)?;
            if a.no_timing {
                strip_timing(&mut value);
            }
            emit_json(&value, &a.output)
        }
        Format::Csv => {
            let mut w = sink(&a.output)?;
            write_csv(&reports, &mut w, !a.no_timing)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn strip_timing(value: &mut Value) {
    for report in value.as_array_mut().into_iter().flatten() {
        for record in report["records"].as_array_mut().into_iter().flatten() {
            if let Some(r) = record.as_object_mut() {
                r.remove("runtime_ms");
            }
        }
    }
}

fn hamiltonian(a: HamiltonianArgs) -> anyhow::Result<()> {
    let (y, ms) = measured(&a.marginals, &a.pattern_set)?;
    emit_text(&build_hamiltonian(&ms, &y)?.dump(), &a.output)
}

fn circuit(a: CircuitArgs) -> anyhow::Result<()> {
    let (y, ms) = measured(&a.marginals, &a.pattern_set)?;
    let h = build_hamiltonian(&ms, &y)?;
    let params = QaoaParams::new(a.gammas, a.betas)?;
    emit_text(&ansatz_circuit(&h, &params).to_text(), &a.output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Patterns(a) => patterns(a),
        Command::Measure(a) => measure(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Experiment(a) => experiment(a),
        Command::Hamiltonian(a) => hamiltonian(a),
        Command::Circuit(a) => circuit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

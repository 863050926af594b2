//! Python bindings. Build with `maturin develop -m crates/py/pyproject.toml`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qcsense::experiment::{run_plan, run_sweep, ExperimentPlan};
use qcsense::hamiltonian::build_hamiltonian;
use qcsense::measurement::default_quadruplets;
use qcsense::qaoa::{self, ansatz_circuit, depth_for_parameter_count, OptimizerConfig, QaoaParams};
use qcsense::signal::random_sparse_signal;
use qcsense::solvers::QaoaSolverConfig;
use qcsense::{
    matching_pursuit, BitIndex, IsingHamiltonian, Marginals, MeasurementSet, PursuitConfig, ReconstructionResult,
    SolverSpec, SparseSignal,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Sparse signal over the `2^n` bin indices.
#[pyclass(name = "Signal", module = "pyqcsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySignal(SparseSignal);

#[pymethods]
impl PySignal {
    #[new]
    fn new(n: u32, spikes: Vec<(u64, f64)>) -> PyResult<Self> {
        SparseSignal::new(n, spikes).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, sparsity, seed=0, low=0.1, high=1.0))]
    fn random(n: u32, sparsity: usize, seed: u64, low: f64, high: f64) -> PyResult<Self> {
        random_sparse_signal(n, sparsity, (low, high), seed).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    #[getter]
    fn spikes(&self) -> Vec<(u64, f64)> {
        self.0.spikes().iter().map(|s| (s.position.value(), s.value)).collect()
    }

    #[getter]
    fn sparsity(&self) -> usize {
        self.0.sparsity()
    }

    fn dense(&self) -> PyResult<Vec<f64>> {
        self.0.dense_vector().map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.sparsity()
    }

    fn __repr__(&self) -> String {
        format!("Signal(n={}, spikes={:?})", self.0.n(), self.spikes())
    }
}

/// Ordered list of binary patterns; row `i` of the implicit measurement matrix.
#[pyclass(name = "PatternSet", module = "pyqcsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPatternSet(MeasurementSet);

#[pymethods]
impl PyPatternSet {
    /// Each pattern is a list of `(bit, value)` constraints, bits counted from 1.
    #[new]
    fn new(n: u32, patterns: Vec<Vec<(u32, u8)>>) -> PyResult<Self> {
        let patterns = patterns.into_iter().map(qcsense::Pattern::new).collect();
        MeasurementSet::new(n, patterns).map(Self).map_err(err)
    }

    #[staticmethod]
    fn nearest_neighbor(n: u32) -> PyResult<Self> {
        MeasurementSet::nearest_neighbor(n).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, q=None, seed=0))]
    fn quadruplets(n: u32, q: Option<usize>, seed: u64) -> PyResult<Self> {
        MeasurementSet::random_quadruplets(n, q.unwrap_or_else(|| default_quadruplets(n)), seed)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn all_bits_fixed(n: u32) -> PyResult<Self> {
        MeasurementSet::all_bits_fixed(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    #[getter]
    fn patterns(&self) -> Vec<Vec<(u32, u8)>> {
        self.0.patterns().iter().map(|p| p.constraints().iter().map(|c| (c.bit, c.value)).collect()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn measure(&self, signal: &PySignal) -> PyResult<Vec<f64>> {
        self.0.measure(&signal.0).map(|m| m.0).map_err(err)
    }

    /// Signed `(A^T r)_z`.
    fn column_dot(&self, z: u64, r: Vec<f64>) -> PyResult<f64> {
        let z = BitIndex::new(self.0.n(), z).map_err(err)?;
        let r = self.marginals(r)?;
        Ok(self.0.column_dot(z, &r))
    }

    fn hamiltonian(&self, r: Vec<f64>) -> PyResult<PyHamiltonian> {
        build_hamiltonian(&self.0, &self.marginals(r)?).map(PyHamiltonian).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("PatternSet(n={}, len={})", self.0.n(), self.0.len())
    }
}

impl PyPatternSet {
    fn marginals(&self, r: Vec<f64>) -> PyResult<Marginals> {
        if r.len() != self.0.len() {
            return Err(err(format!("{} values for {} patterns", r.len(), self.0.len())));
        }
        Ok(Marginals(r))
    }
}

/// Diagonal Hamiltonian `sum c_S prod_{j in S} Z_j`.
#[pyclass(name = "Hamiltonian", module = "pyqcsense", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHamiltonian(IsingHamiltonian);

#[pymethods]
impl PyHamiltonian {
    #[new]
    fn new(n: u32, terms: Vec<(Vec<u32>, f64)>) -> PyResult<Self> {
        IsingHamiltonian::from_terms(n, terms).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    #[getter]
    fn terms(&self) -> Vec<(Vec<u32>, f64)> {
        self.0.terms().into_iter().map(|t| (t.support, t.coeff)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn evaluate(&self, z: u64) -> PyResult<f64> {
        Ok(self.0.evaluate(BitIndex::new(self.0.n(), z).map_err(err)?))
    }

    fn diagonal(&self) -> PyResult<Vec<f64>> {
        self.0.diagonal().map_err(err)
    }

    fn is_chain(&self) -> bool {
        self.0.is_chain()
    }

    fn dump(&self) -> String {
        self.0.dump()
    }

    /// `<gamma, beta| H |gamma, beta>` for the QAOA state with these angles.
    fn expectation(&self, gammas: Vec<f64>, betas: Vec<f64>) -> PyResult<f64> {
        let state = qaoa::ansatz_state(&self.0, &QaoaParams::new(gammas, betas).map_err(err)?).map_err(err)?;
        Ok(state.expectation(&self.0))
    }

    /// Born probabilities of the QAOA state.
    fn probabilities(&self, gammas: Vec<f64>, betas: Vec<f64>) -> PyResult<Vec<f64>> {
        let state = qaoa::ansatz_state(&self.0, &QaoaParams::new(gammas, betas).map_err(err)?).map_err(err)?;
        Ok(state.probabilities())
    }

    /// Gate list text for the QAOA circuit with these angles.
    fn circuit(&self, gammas: Vec<f64>, betas: Vec<f64>) -> PyResult<String> {
        Ok(ansatz_circuit(&self.0, &QaoaParams::new(gammas, betas).map_err(err)?).to_text())
    }

    /// Maximises the expectation at depth `p`. Returns `(gammas, betas, value)`.
    #[pyo3(signature = (p, restarts=10, max_evals=200, seed=0))]
    fn optimize(&self, p: usize, restarts: usize, max_evals: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
        let cfg = OptimizerConfig { restarts, max_evals, seed };
        let out = qaoa::optimize(&self.0, p, &cfg).map_err(err)?;
        Ok((out.params.gammas, out.params.betas, out.expectation))
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(n={}, terms={})", self.0.n(), self.0.len())
    }
}

fn solver_spec(solver: &str, params: usize, restarts: usize, max_evals: usize, shots: usize, seed: u64) -> PyResult<SolverSpec> {
    match solver {
        "brute" => Ok(SolverSpec::BruteForce),
        "chain" => Ok(SolverSpec::ChainDp),
        "qaoa" if params > 0 => Ok(SolverSpec::Qaoa(QaoaSolverConfig {
            depth: depth_for_parameter_count(params),
            restarts,
            max_evals,
            shots,
            seed,
        })),
        "qaoa" => Err(err("params must be at least 1")),
        other => Err(err(format!("unknown solver {other:?}; expected brute, chain or qaoa"))),
    }
}

/// Outcome of matching pursuit.
#[pyclass(name = "Reconstruction", module = "pyqcsense", frozen, skip_from_py_object)]
struct PyReconstruction(ReconstructionResult);

#[pymethods]
impl PyReconstruction {
    #[getter]
    fn recovered(&self) -> PySignal {
        PySignal(self.0.recovered.clone())
    }

    #[getter]
    fn termination<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &serde_json::to_string(&self.0.termination).map_err(err)?)
    }

    /// `(position, score, coefficient, residual_norm)` per iteration.
    #[getter]
    fn trace(&self) -> Vec<(u64, f64, f64, f64)> {
        self.0.trace.iter().map(|t| (t.position, t.score, t.coefficient, t.residual_norm)).collect()
    }

    #[getter]
    fn residual(&self) -> Vec<f64> {
        self.0.residual.0.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(err)
    }
}

/// `argmax_z |(A^T r)_z|` as `(z, score)`.
#[pyfunction]
#[pyo3(signature = (patterns, r, solver="chain", params=2, restarts=10, max_evals=200, shots=1024, seed=0))]
#[allow(clippy::too_many_arguments)]
fn solve(
    patterns: &PyPatternSet,
    r: Vec<f64>,
    solver: &str,
    params: usize,
    restarts: usize,
    max_evals: usize,
    shots: usize,
    seed: u64,
) -> PyResult<(u64, f64)> {
    let r = patterns.marginals(r)?;
    let spec = solver_spec(solver, params, restarts, max_evals, shots, seed)?;
    let out = spec.solve(&patterns.0, &r, 0).map_err(err)?;
    Ok((out.position.value(), out.score))
}

#[pyfunction]
#[pyo3(signature = (patterns, y, sparsity, solver="chain", params=2, restarts=10, max_evals=200, shots=1024, seed=0, max_iterations=None))]
#[allow(clippy::too_many_arguments)]
fn reconstruct(
    patterns: &PyPatternSet,
    y: Vec<f64>,
    sparsity: usize,
    solver: &str,
    params: usize,
    restarts: usize,
    max_evals: usize,
    shots: usize,
    seed: u64,
    max_iterations: Option<usize>,
) -> PyResult<PyReconstruction> {
    let y = patterns.marginals(y)?;
    let spec = solver_spec(solver, params, restarts, max_evals, shots, seed)?;
    let mut cfg = PursuitConfig::for_sparsity(sparsity, &y, spec);
    if let Some(m) = max_iterations {
        cfg.max_iterations = m;
    }
    matching_pursuit(&y, &patterns.0, &cfg).map(PyReconstruction).map_err(err)
}

/// Success-rate report(s) for a plan given as a dict; with `sweep`, one report
/// per QAOA parameter count after the classical references.
#[pyfunction]
#[pyo3(signature = (plan, sweep=None))]
fn run_experiment<'py>(py: Python<'py>, plan: &Bound<'py, PyAny>, sweep: Option<Vec<usize>>) -> PyResult<Bound<'py, PyAny>> {
    let text: String = py.import("json")?.call_method1("dumps", (plan,))?.extract()?;
    let plan: ExperimentPlan = serde_json::from_str(&text).map_err(err)?;
    let reports = py.detach(|| match &sweep {
        Some(counts) => run_sweep(&plan, counts),
        None => run_plan(&plan).map(|r| vec![r]),
    });
    json_to_py(py, &serde_json::to_string(&reports.map_err(err)?).map_err(err)?)
}

#[pymodule]
fn pyqcsense(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySignal>()?;
    m.add_class::<PyPatternSet>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyReconstruction>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("DENSE_LIMIT", qcsense::DENSE_LIMIT)?;
    Ok(())
}

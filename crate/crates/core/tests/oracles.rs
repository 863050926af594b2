use num_complex::Complex64;
use qcsense::experiment::{run_single, ExperimentPlan, PatternKind, SolverChoice};
use qcsense::hamiltonian::build_hamiltonian;
use qcsense::qaoa::{self, ansatz_circuit, simulate_gates, QaoaParams, StateVector};
use qcsense::{matching_pursuit, recovery_success, IsingHamiltonian, MeasurementSet, PursuitConfig, SolverSpec, SparseSignal};

type Matrix = Vec<Vec<Complex64>>;

fn zeros(d: usize) -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); d]; d]
}

fn identity(d: usize) -> Matrix {
    let mut m = zeros(d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `exp(i t M)` by scaling and squaring a truncated Taylor series.
fn expi(m: &Matrix, t: f64) -> Matrix {
    let d = m.len();
    let norm: f64 = m.iter().flatten().map(|c| c.norm()).sum::<f64>() * t.abs();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = Complex64::new(0.0, t / 2f64.powi(squarings));
    let a: Matrix = m.iter().map(|row| row.iter().map(|c| c * scale).collect()).collect();
    let mut sum = identity(d);
    let mut term = identity(d);
    for k in 1..30 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for c in row.iter_mut() {
                *c /= k as f64;
            }
        }
        for i in 0..d {
            for j in 0..d {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Two qubits, qubit 1 on the high bit.
fn two_qubit_operators(h: &IsingHamiltonian) -> (Matrix, Matrix) {
    let diag = h.diagonal().unwrap();
    let mut cost = zeros(4);
    let mut mixer = zeros(4);
    for z in 0..4 {
        cost[z][z] = Complex64::new(diag[z], 0.0);
        mixer[z][z ^ 0b01] += Complex64::new(1.0, 0.0);
        mixer[z][z ^ 0b10] += Complex64::new(1.0, 0.0);
    }
    (cost, mixer)
}

#[test]
fn ansatz_matches_dense_exponentials() {
    let h = IsingHamiltonian::from_terms(2, [(vec![], 0.3), (vec![1], -0.8), (vec![2], 0.45), (vec![1, 2], 1.1)]).unwrap();
    let (cost, mixer) = two_qubit_operators(&h);
    let plus = vec![Complex64::new(0.5, 0.0); 4];
    for gi in 0..9 {
        for bi in 0..9 {
            let gamma = -2.0 + 0.5 * gi as f64;
            let beta = -1.6 + 0.4 * bi as f64;
            let want = apply(&expi(&mixer, beta), &apply(&expi(&cost, gamma), &plus));
            let params = QaoaParams::new(vec![gamma], vec![beta]).unwrap();
            let got = qaoa::ansatz_state(&h, &params).unwrap();
            for (a, b) in got.amplitudes().iter().zip(&want) {
                assert!((a - b).norm() < 1e-10, "gamma {gamma} beta {beta}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn depth_two_matches_dense_exponentials() {
    let h = IsingHamiltonian::from_terms(2, [(vec![1], 0.6), (vec![1, 2], -0.9)]).unwrap();
    let (cost, mixer) = two_qubit_operators(&h);
    let params = QaoaParams::new(vec![0.7, -1.3], vec![0.2, 0.9]).unwrap();
    let mut want = vec![Complex64::new(0.5, 0.0); 4];
    for (g, b) in params.gammas.iter().zip(&params.betas) {
        want = apply(&expi(&mixer, *b), &apply(&expi(&cost, *g), &want));
    }
    let got = qaoa::ansatz_state(&h, &params).unwrap();
    let want = StateVector::from_amplitudes(want).unwrap();
    assert!((got.fidelity(&want) - 1.0).abs() < 1e-12);
    let circuit = simulate_gates(&StateVector::basis(2, 0).unwrap(), &ansatz_circuit(&h, &params)).unwrap();
    assert!((circuit.fidelity(&want) - 1.0).abs() < 1e-10);
}

#[test]
fn expectation_stays_within_spectrum() {
    let ms = MeasurementSet::random_quadruplets(6, 3, 12).unwrap();
    let x = SparseSignal::new(6, [(5, 0.7), (40, 0.3), (63, 0.9)]).unwrap();
    let h = build_hamiltonian(&ms, &ms.measure(&x).unwrap()).unwrap();
    let diag = h.diagonal().unwrap();
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for k in 0..40 {
        let g = (k as f64 * 0.37).sin() * 3.0;
        let b = (k as f64 * 0.91).cos() * 1.5;
        let params = QaoaParams::new(vec![g, -g / 2.0], vec![b, b / 3.0]).unwrap();
        let s = qaoa::ansatz_state(&h, &params).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let e = s.expectation(&h);
        assert!(e >= lo - 1e-12 && e <= hi + 1e-12);
    }
}

#[test]
fn two_spike_nearest_neighbour_recovery() {
    // Spikes at 000000 and 111111 share no nearest-neighbour pattern.
    let ms = MeasurementSet::nearest_neighbor(6).unwrap();
    let x = SparseSignal::new(6, [(0, 0.8), (63, 0.5)]).unwrap();
    let y = ms.measure(&x).unwrap();
    for solver in [SolverSpec::BruteForce, SolverSpec::ChainDp] {
        let out = matching_pursuit(&y, &ms, &PursuitConfig::for_sparsity(2, &y, solver)).unwrap();
        assert!(recovery_success(&x, &out, 1e-6), "{}", solver.name());
        assert!((out.recovered.value_at(0).unwrap() - 0.8).abs() < 1e-12);
        assert!(out.residual.norm() < 1e-12);
    }
}

#[test]
fn sparse_regime_trial_is_reproducible() {
    let plan = ExperimentPlan { n: 6, sparsity: 2, trial_count: 1, ..Default::default() };
    for solver in [SolverChoice::Brute, SolverChoice::Chain, SolverChoice::qaoa(3)] {
        let p = plan.with(PatternKind::NearestNeighbor, solver);
        let a = run_single(&p, 77).unwrap();
        let b = run_single(&p, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.signal.sparsity(), 2);
        assert!(a.success);
    }
}

#[test]
fn quadruplet_patterns_recover_what_pairs_cannot() {
    let nn = MeasurementSet::nearest_neighbor(4).unwrap();
    let full = MeasurementSet::random_quadruplets(4, 1, 0).unwrap();
    // Two 2-sparse signals with equal pair marginals but different supports.
    let mut found = None;
    'outer: for p in 0..16u64 {
        for q in p + 1..16 {
            for r in 0..16u64 {
                for s in r + 1..16 {
                    if (p, q) == (r, s) {
                        continue;
                    }
                    let x = SparseSignal::new(4, [(p, 0.5), (q, 0.5)]).unwrap();
                    let w = SparseSignal::new(4, [(r, 0.5), (s, 0.5)]).unwrap();
                    if nn.measure(&x).unwrap() == nn.measure(&w).unwrap() {
                        found = Some((x, w));
                        break 'outer;
                    }
                }
            }
        }
    }
    let (x, w) = found.expect("pair marginals are not injective on 2-sparse signals");
    assert_ne!(full.measure(&x).unwrap(), full.measure(&w).unwrap());
    let y = full.measure(&x).unwrap();
    let out = matching_pursuit(&y, &full, &PursuitConfig::for_sparsity(2, &y, SolverSpec::BruteForce)).unwrap();
    assert!(recovery_success(&x, &out, 1e-6));
}

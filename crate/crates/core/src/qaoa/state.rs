use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::IsingHamiltonian;
use crate::signal::BitIndex;
use crate::{Error, Result, DENSE_LIMIT};

/// `2^n` amplitudes; basis state `z` uses the [`BitIndex`] layout, so qubit
/// `j` is bit `n - j` of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: u32,
    amps: Vec<Complex64>,
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize("state needs at least one qubit".into()));
    }
    if n > DENSE_LIMIT {
        return Err(Error::Capacity { n, limit: DENSE_LIMIT });
    }
    Ok(())
}

impl StateVector {
    /// `|+>^n`, the top eigenstate of the transverse-field mixer.
    pub fn uniform(n: u32) -> Result<Self> {
        check_n(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { n, amps: vec![a; dim] })
    }

    pub fn basis(n: u32, z: u64) -> Result<Self> {
        check_n(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        let slot = amps
            .get_mut(z as usize)
            .ok_or_else(|| Error::InvalidSize(format!("basis index {z} outside {n} qubits")))?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes, renormalising them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidSize(format!("{len} amplitudes is not 2^n")));
        }
        let n = len.trailing_zeros();
        check_n(n)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidSize("amplitudes have zero or non-finite norm".into()));
        }
        Ok(Self { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn probability(&self, z: u64) -> f64 {
        self.amps[z as usize].norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `a_z <- a_z exp(i gamma h(z))`.
    pub fn apply_phase_layer(&mut self, h: &IsingHamiltonian, gamma: f64) {
        assert_eq!(h.n(), self.n, "hamiltonian and state sizes differ");
        for (z, a) in self.amps.iter_mut().enumerate() {
            *a *= Complex64::cis(gamma * h.evaluate_raw(z as u64));
        }
    }

    /// Phase layer from a precomputed diagonal.
    pub fn apply_phase_diagonal(&mut self, diagonal: &[f64], gamma: f64) {
        assert_eq!(diagonal.len(), self.amps.len());
        for (a, &hz) in self.amps.iter_mut().zip(diagonal) {
            *a *= Complex64::cis(gamma * hz);
        }
    }

    /// `exp(i beta X)` on every qubit.
    pub fn apply_mixer_layer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let is = Complex64::new(0.0, s);
        for k in 0..self.n {
            let stride = 1usize << k;
            for block in self.amps.chunks_exact_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x0, x1) = (*a0, *a1);
                    *a0 = x0 * c + x1 * is;
                    *a1 = x0 * is + x1 * c;
                }
            }
        }
    }

    /// `sum_z |a_z|^2 h(z)`.
    pub fn expectation(&self, h: &IsingHamiltonian) -> f64 {
        assert_eq!(h.n(), self.n, "hamiltonian and state sizes differ");
        self.amps
            .iter()
            .enumerate()
            .map(|(z, a)| a.norm_sqr() * h.evaluate_raw(z as u64))
            .sum()
    }

    pub fn expectation_diagonal(&self, diagonal: &[f64]) -> f64 {
        self.amps.iter().zip(diagonal).map(|(a, hz)| a.norm_sqr() * hz).sum()
    }

    /// `shots` independent draws from the Born distribution.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<BitIndex> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = WeightedIndex::new(self.probabilities()).expect("state has positive norm");
        (0..shots)
            .map(|_| BitIndex::new_unchecked(self.n, dist.sample(&mut rng) as u64))
            .collect()
    }
}

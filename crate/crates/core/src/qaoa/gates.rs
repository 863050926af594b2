//! Gate-level form of the QAOA layers.
//!
//! `RZ(q, a) = exp(-i a Z / 2)` and `RX(q, a) = exp(-i a X / 2)`, qubits
//! 1-based. The evolution `exp(i t c Z_S)` of one Pauli string becomes a
//! CNOT ladder that collects the parity of `S` on its last qubit, one
//! `RZ(-2 t c)`, and the reversed ladder.

use std::fmt;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::{QaoaParams, StateVector};
use crate::hamiltonian::IsingHamiltonian;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cnot { control: u32, target: u32 },
    Rz { qubit: u32, angle: f64 },
    Rx { qubit: u32, angle: f64 },
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Cnot { control, target } => write!(f, "CX {control} {target}"),
            Gate::Rz { qubit, angle } => write!(f, "RZ {qubit} {angle}"),
            Gate::Rx { qubit, angle } => write!(f, "RX {qubit} {angle}"),
        }
    }
}

impl std::str::FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::InvalidGate(format!("cannot parse {line:?}"));
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["CX", c, t] => Ok(Gate::Cnot {
                control: c.parse().map_err(|_| bad())?,
                target: t.parse().map_err(|_| bad())?,
            }),
            ["RZ", q, a] => Ok(Gate::Rz { qubit: q.parse().map_err(|_| bad())?, angle: a.parse().map_err(|_| bad())? }),
            ["RX", q, a] => Ok(Gate::Rx { qubit: q.parse().map_err(|_| bad())?, angle: a.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GateList {
    pub gates: Vec<Gate>,
}

impl GateList {
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// One gate per line.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let gates = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(Self { gates })
    }

    fn extend(&mut self, other: GateList) {
        self.gates.extend(other.gates);
    }
}

/// Gates for `exp(i t H)`. Identity terms only add a global phase and emit
/// nothing.
pub fn decompose_evolution(h: &IsingHamiltonian, t: f64) -> GateList {
    let mut gates = Vec::new();
    for term in h.terms() {
        let Some((&last, _)) = term.support.split_last() else {
            continue;
        };
        let ladder: Vec<Gate> = term
            .support
            .windows(2)
            .map(|w| Gate::Cnot { control: w[0], target: w[1] })
            .collect();
        gates.extend(ladder.iter().copied());
        gates.push(Gate::Rz { qubit: last, angle: -2.0 * t * term.coeff });
        gates.extend(ladder.iter().rev().copied());
    }
    GateList { gates }
}

/// `exp(i beta X)` on each qubit.
pub fn mixer_gates(n: u32, beta: f64) -> GateList {
    GateList {
        gates: (1..=n).map(|q| Gate::Rx { qubit: q, angle: -2.0 * beta }).collect(),
    }
}

/// Full ansatz starting from `|0...0>`: Hadamards (as `RZ RX RZ`), then the
/// alternating phase and mixer layers.
pub fn ansatz_circuit(h: &IsingHamiltonian, params: &QaoaParams) -> GateList {
    let n = h.n();
    let mut out = GateList::default();
    for q in 1..=n {
        out.gates.push(Gate::Rz { qubit: q, angle: FRAC_PI_2 });
        out.gates.push(Gate::Rx { qubit: q, angle: FRAC_PI_2 });
        out.gates.push(Gate::Rz { qubit: q, angle: FRAC_PI_2 });
    }
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        out.extend(decompose_evolution(h, gamma));
        out.extend(mixer_gates(n, beta));
    }
    out
}

/// Applies `gates` in order.
pub fn simulate_gates(state: &StateVector, gates: &GateList) -> Result<StateVector> {
    let n = state.n();
    let mut out = state.clone();
    let check = |q: u32| {
        if q == 0 || q > n {
            Err(Error::InvalidGate(format!("qubit {q} outside 1..={n}")))
        } else {
            Ok(1usize << (n - q))
        }
    };
    for gate in &gates.gates {
        let amps = out.amplitudes_mut();
        match *gate {
            Gate::Cnot { control, target } => {
                let (cbit, tbit) = (check(control)?, check(target)?);
                if cbit == tbit {
                    return Err(Error::InvalidGate(format!("CX with control = target = {control}")));
                }
                for z in 0..amps.len() {
                    if z & cbit != 0 && z & tbit == 0 {
                        amps.swap(z, z | tbit);
                    }
                }
            }
            Gate::Rz { qubit, angle } => {
                let bit = check(qubit)?;
                let (p0, p1) = (Complex64::cis(-angle / 2.0), Complex64::cis(angle / 2.0));
                for (z, a) in amps.iter_mut().enumerate() {
                    *a *= if z & bit == 0 { p0 } else { p1 };
                }
            }
            Gate::Rx { qubit, angle } => {
                let bit = check(qubit)?;
                let (s, c) = (angle / 2.0).sin_cos();
                let mis = Complex64::new(0.0, -s);
                for z in 0..amps.len() {
                    if z & bit == 0 {
                        let (a0, a1) = (amps[z], amps[z | bit]);
                        amps[z] = a0 * c + a1 * mis;
                        amps[z | bit] = a0 * mis + a1 * c;
                    }
                }
            }
        }
    }
    Ok(out)
}

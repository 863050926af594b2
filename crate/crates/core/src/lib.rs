//! Sparse-signal reconstruction from structured binary marginals.
//!
//! A signal over `2^n` bins is observed through patterns that fix a few bits
//! of the bin index. Matching pursuit recovers the support one spike at a
//! time; each support-detection step is the search for the extremal diagonal
//! entry of a generalized Ising Hamiltonian, handed to one of three backends
//! (exhaustive scan, chain dynamic programming, simulated QAOA).

pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod measurement;
pub mod pursuit;
pub mod qaoa;
pub mod signal;
pub mod solvers;

pub use error::{Error, Result};
pub use hamiltonian::{IsingHamiltonian, PauliTerm};
pub use measurement::{Constraint, Marginals, MeasurementSet, Pattern};
pub use pursuit::{matching_pursuit, recovery_success, PursuitConfig, ReconstructionResult};
pub use signal::{BitIndex, SparseSignal, Spike};
pub use solvers::{SolverOutcome, SolverSpec};

/// Upper bound on `n` for anything that touches all `2^n` indices.
pub const DENSE_LIMIT: u32 = 20;

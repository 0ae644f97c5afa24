//! Harrow–Nielsen style simulation: each shot carries one Bloch vector per
//! qubit, replaces the pair acted on by a noisy CZ with a sample from a
//! separable decomposition of the output, and measures Pauli axes at the
//! end. A dense density-matrix oracle serves as the reference.

mod circuit;
mod oracle;
mod sampler;
mod stats;
mod table;

use thiserror::Error;

use crate::lp::LpError;
use crate::pauli::BlochVector;
use crate::scalar::Scalar;
use crate::state_sets::StateSetError;

pub use circuit::{Circuit, Gate, Rotation};
pub use oracle::{exact_distribution, final_density, reduced_pauli_coefficients, rotation_unitary, MAX_ORACLE_QUBITS};
pub use sampler::{
    estimate, sample_noisy_cz, shot_rng, simulate_shot, CompiledCircuit, Estimate, OutcomeEstimate, ShotResult,
};
pub use stats::{chi_square, z_scores, ChiSquare};
pub use table::{build_decomposition_table, DecompositionTable, PairDecomposition};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("not simulable at noise level λ = {lambda}: requires λ ≥ λ* = {required}")]
    BelowThreshold { lambda: Scalar, required: Scalar },
    #[error("measurement probability {probability} outside [0, 1] for state {state}")]
    InvalidProbability { state: BlochVector, probability: Scalar },
    #[error("oracle supports at most {max} qubits, circuit has {qubits}")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("oracle state lost normalisation: trace {0}")]
    Normalisation(f64),
    #[error(transparent)]
    StateSet(#[from] StateSetError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("{0}")]
    Internal(String),
}

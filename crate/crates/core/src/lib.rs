//! Generalised separability of the noisy CZ gate over truncated-cube state
//! sets.
//!
//! The crate computes, in exact rational arithmetic, the least joint
//! depolarising noise `λ` that makes every output of a noisy CZ gate
//! separable with respect to `TRUN(r)` (a truncated cube of Bloch vectors
//! that contains the Bloch ball and sits inside the Pauli dual cube). The
//! resulting decompositions drive a Harrow–Nielsen style Monte Carlo
//! simulator of magic-state circuits.
//!
//! Layout:
//! - [`pauli`]: Pauli-expansion operators, CZ action, outcome probabilities.
//! - [`state_sets`]: `TRUN(r)`, symmetry group, canonical cases.
//! - [`lp`]: exact simplex, separability program, certificates.
//! - [`threshold`]: thresholds, witness bounds, sweeps, certificate checks.
//! - [`sim`]: the sampler, circuits, and a dense density-matrix oracle.

// 4×4 coefficient tables read best with explicit indices, and errors carry
// exact rationals for reporting.
#![allow(clippy::needless_range_loop, clippy::result_large_err, clippy::large_enum_variant)]

pub mod dense;
pub mod lp;
pub mod pauli;
pub mod scalar;
pub mod sim;
pub mod state_sets;
pub mod threshold;

pub use lp::{CertificateTarget, ProductTerm, SeparableCertificate};
pub use pauli::{BlochVector, Outcome, PauliIndex, TwoQubitOperator};
pub use scalar::Scalar;
pub use state_sets::{Case, TruncatedCube, TwoQubitSymmetry};

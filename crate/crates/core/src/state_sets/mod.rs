//! Truncated-cube state sets, the Pauli dual cube, and the symmetry group
//! that reduces all extremal input pairs of the CZ gate to four cases.

mod cases;
mod cube;
mod symmetry;

use thiserror::Error;

use crate::lp::LpError;
use crate::pauli::BlochVector;
use crate::scalar::Scalar;

pub use cases::{canonical_cases, cz_orbit_classes, Case, OrbitClass};
pub use cube::{contains_dual_cube, ConvexCombination, Facet, TruncatedCube};
pub use symmetry::{apply_symmetry, canonical_form, CanonicalCache, SignedPermutation, TwoQubitSymmetry, GROUP_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateSetError {
    #[error("truncation parameter r = {0} must lie in (0, 1]")]
    BadTruncation(Scalar),
    #[error("vector {0} lies outside the truncated cube")]
    OutsideCube(BlochVector),
    #[error(transparent)]
    Lp(#[from] LpError),
}

pub fn decompose_single(cube: &TruncatedCube, v: &BlochVector) -> Result<ConvexCombination, StateSetError> {
    cube.decompose(v)
}

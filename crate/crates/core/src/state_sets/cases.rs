use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::symmetry::CanonicalCache;
use super::TruncatedCube;
use crate::pauli::{apply_cz, product_operator, BlochVector, TwoQubitOperator};
use crate::scalar::Scalar;

/// The four canonical extremal input pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Case {
    One,
    Two,
    Three,
    Four,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::One, Case::Two, Case::Three, Case::Four];

    pub fn number(self) -> u8 {
        match self {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
            Case::Four => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get((n as usize).wrapping_sub(1)).copied()
    }

    /// `(A, B)` Bloch vectors:
    /// 1: `(1,1,r)⊗(1,1,r)`, 2: `(r,1,1)⊗(1,1,r)`, 3: `(r,1,1)⊗(r,1,1)`, 4: `(r,1,1)⊗(1,r,1)`.
    ///
    /// The pair `(1,1,r)⊗(1,r,1)` is sometimes listed for case 3, but its CZ
    /// image lies in the orbit of case 2; `(r,1,1)⊗(r,1,1)` is the pair whose
    /// output has the case 3 threshold `1 − 1/(1+2r)`.
    pub fn inputs(self, r: &Scalar) -> (BlochVector, BlochVector) {
        let one = Scalar::one;
        let r_x = || BlochVector::new(r.clone(), one(), one());
        let r_y = || BlochVector::new(one(), r.clone(), one());
        let r_z = || BlochVector::new(one(), one(), r.clone());
        match self {
            Case::One => (r_z(), r_z()),
            Case::Two => (r_x(), r_z()),
            Case::Three => (r_x(), r_x()),
            Case::Four => (r_x(), r_y()),
        }
    }

    pub fn input_operator(self, r: &Scalar) -> TwoQubitOperator {
        let (a, b) = self.inputs(r);
        product_operator(&a, &b)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl From<Case> for u8 {
    fn from(c: Case) -> u8 {
        c.number()
    }
}

impl TryFrom<u8> for Case {
    type Error = String;
    fn try_from(n: u8) -> Result<Self, String> {
        Case::from_number(n).ok_or_else(|| format!("case must be 1..=4, got {n}"))
    }
}

/// The four labelled input operators `ρ1..ρ4`.
pub fn canonical_cases(r: &Scalar) -> [(Case, TwoQubitOperator); 4] {
    Case::ALL.map(|c| (c, c.input_operator(r)))
}

/// One orbit class of ideal CZ outputs over extremal input pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClass {
    pub representative: TwoQubitOperator,
    /// Indices `(a, b)` into [`TruncatedCube::extrema`].
    pub members: Vec<(usize, usize)>,
}

/// Groups the 576 operators `CZ(e_A ⊗ e_B)` by canonical form. Classes are
/// ordered by representative.
pub fn cz_orbit_classes(cube: &TruncatedCube, cache: &CanonicalCache) -> Vec<OrbitClass> {
    use rayon::prelude::*;
    use std::collections::BTreeMap;

    let ext = cube.extrema();
    let pairs: Vec<(usize, usize)> = (0..ext.len()).flat_map(|a| (0..ext.len()).map(move |b| (a, b))).collect();
    let canon: Vec<Vec<Scalar>> = pairs
        .par_iter()
        .map(|&(a, b)| cache.canonical_form(&apply_cz(&product_operator(&ext[a], &ext[b]))).0.flatten())
        .collect();
    let mut classes: BTreeMap<Vec<Scalar>, Vec<(usize, usize)>> = BTreeMap::new();
    for (pair, key) in pairs.into_iter().zip(canon) {
        classes.entry(key).or_default().push(pair);
    }
    classes
        .into_iter()
        .map(|(key, members)| OrbitClass {
            representative: TwoQubitOperator::from_flat(&key).expect("normalised"),
            members,
        })
        .collect()
}

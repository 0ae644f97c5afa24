use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::StateSetError;
use crate::lp::{simplex_solve, LinearProgram, LpError};
use crate::pauli::BlochVector;
use crate::scalar::{int, Scalar};

/// The truncated cube `TRUN(r)`: convex hull of all signed vectors whose
/// absolute coordinates are a permutation of `(1, 1, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedCube {
    r: Scalar,
}

/// A half-space `normal · v ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: [i64; 3],
    pub bound: Scalar,
}

impl Facet {
    pub fn slack(&self, v: &BlochVector) -> Scalar {
        let dot: Scalar = self.normal.iter().zip(v.coords()).map(|(&n, c)| int(n) * c).sum();
        &self.bound - dot
    }
}

impl TruncatedCube {
    pub fn new(r: Scalar) -> Result<Self, StateSetError> {
        if !r.is_positive() || r > Scalar::one() {
            return Err(StateSetError::BadTruncation(r));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> &Scalar {
        &self.r
    }

    /// All 24 extremal patterns. Ordered by the position of `r` (x, y, z),
    /// then by sign pattern with `+` before `−` and x most significant.
    /// At `r = 1` the list still has 24 entries but only 8 distinct points.
    pub fn extrema(&self) -> Vec<BlochVector> {
        let mut out = Vec::with_capacity(24);
        for r_pos in 0..3 {
            for signs in 0..8u8 {
                let coords: [Scalar; 3] = std::array::from_fn(|k| {
                    let mag = if k == r_pos { self.r.clone() } else { Scalar::one() };
                    if signs & (4 >> k) != 0 {
                        -mag
                    } else {
                        mag
                    }
                });
                out.push(BlochVector::from_array(coords));
            }
        }
        out
    }

    /// The 14 facet inequalities: 6 cube faces and 8 corner cuts.
    pub fn facets(&self) -> Vec<Facet> {
        let mut out = Vec::with_capacity(14);
        for axis in 0..3 {
            for sign in [1, -1] {
                let mut normal = [0; 3];
                normal[axis] = sign;
                out.push(Facet { normal, bound: Scalar::one() });
            }
        }
        let corner = int(2) + &self.r;
        for signs in 0..8u8 {
            let normal = std::array::from_fn(|k| if signs & (4 >> k) != 0 { -1 } else { 1 });
            out.push(Facet { normal, bound: corner.clone() });
        }
        out
    }

    /// Exact membership; the boundary counts as inside.
    pub fn contains(&self, v: &BlochVector) -> bool {
        self.facets().iter().all(|f| !f.slack(v).is_negative())
    }

    pub fn tight_facets(&self, v: &BlochVector) -> Vec<Facet> {
        self.facets().into_iter().filter(|f| f.slack(v).is_zero()).collect()
    }

    pub fn is_extremum(&self, v: &BlochVector) -> bool {
        let mut mags: Vec<Scalar> = v.coords().iter().map(Signed::abs).collect();
        mags.sort();
        mags == [self.r.clone(), Scalar::one(), Scalar::one()]
    }

    /// Writes `v` as a convex combination of at most four extrema, taken
    /// from a basic feasible solution of the 4-row feasibility system.
    pub fn decompose(&self, v: &BlochVector) -> Result<ConvexCombination, StateSetError> {
        if !self.contains(v) {
            return Err(StateSetError::OutsideCube(v.clone()));
        }
        let extrema = self.extrema();
        let mut constraints = vec![vec![Scalar::one(); extrema.len()]];
        for axis in 0..3 {
            constraints.push(extrema.iter().map(|e| e.axis(axis).clone()).collect());
        }
        let lp = LinearProgram {
            objective: vec![Scalar::zero(); extrema.len()],
            constraints,
            rhs: vec![Scalar::one(), v.x().clone(), v.y().clone(), v.z().clone()],
        };
        let sol = simplex_solve(&lp).map_err(|e| match e {
            LpError::Infeasible { .. } => StateSetError::OutsideCube(v.clone()),
            other => StateSetError::Lp(other),
        })?;
        let terms = sol.weights.into_iter().map(|(j, w)| (w, extrema[j].clone())).collect();
        Ok(ConvexCombination { r: self.r.clone(), terms })
    }
}

/// Pauli-measurement dual set `M*`: the cube `|x|, |y|, |z| ≤ 1`.
pub fn contains_dual_cube(v: &BlochVector) -> bool {
    v.coords().iter().all(|c| c.abs() <= Scalar::one())
}

/// `Σ w_k · v_k` with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexCombination {
    pub r: Scalar,
    pub terms: Vec<(Scalar, BlochVector)>,
}

impl ConvexCombination {
    pub fn recombine(&self) -> BlochVector {
        let coords = std::array::from_fn(|k| self.terms.iter().map(|(w, v)| w * v.axis(k)).sum());
        BlochVector::from_array(coords)
    }

    pub fn total_weight(&self) -> Scalar {
        self.terms.iter().map(|(w, _)| w.clone()).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct CombinationRepr {
    #[serde(with = "crate::scalar::serde_scalar")]
    r: Scalar,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(with = "crate::scalar::serde_scalar")]
    w: Scalar,
    v: BlochVector,
}

impl Serialize for ConvexCombination {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        CombinationRepr {
            r: self.r.clone(),
            terms: self.terms.iter().map(|(w, v)| TermRepr { w: w.clone(), v: v.clone() }).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ConvexCombination {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = CombinationRepr::deserialize(de)?;
        Ok(Self { r: repr.r, terms: repr.terms.into_iter().map(|t| (t.w, t.v)).collect() })
    }
}

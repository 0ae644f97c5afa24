use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::pauli::{BlochVector, TwoQubitOperator};
use crate::scalar::Scalar;

/// Signed permutation of the three Bloch axes: `(g v)_k = s_k · v_{π(k)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: [u8; 3],
    negate: [bool; 3],
}

impl SignedPermutation {
    pub const IDENTITY: Self = Self { perm: [0, 1, 2], negate: [false; 3] };

    /// `perm` must be a permutation of `0..3`.
    pub fn new(perm: [u8; 3], negate: [bool; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p as usize] {
                return None;
            }
            seen[p as usize] = true;
        }
        Some(Self { perm, negate })
    }

    /// From a 3×3 matrix with exactly one `±1` in every row and column.
    pub fn from_matrix(m: [[i8; 3]; 3]) -> Option<Self> {
        let mut perm = [0u8; 3];
        let mut negate = [false; 3];
        for (k, row) in m.iter().enumerate() {
            let nonzero: Vec<usize> = (0..3).filter(|&c| row[c] != 0).collect();
            if nonzero.len() != 1 || row[nonzero[0]].abs() != 1 {
                return None;
            }
            perm[k] = nonzero[0] as u8;
            negate[k] = row[nonzero[0]] < 0;
        }
        Self::new(perm, negate)
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        let mut m = [[0i8; 3]; 3];
        for k in 0..3 {
            m[k][self.perm[k] as usize] = if self.negate[k] { -1 } else { 1 };
        }
        m
    }

    /// All 48 elements, identity first.
    pub fn all() -> Vec<Self> {
        const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(48);
        for perm in PERMS {
            for bits in 0..8u8 {
                out.push(Self { perm, negate: std::array::from_fn(|k| bits & (1 << k) != 0) });
            }
        }
        out
    }

    /// The 24 proper rotations (determinant +1).
    pub fn rotations() -> Vec<Self> {
        Self::all().into_iter().filter(|g| g.determinant() == 1).collect()
    }

    pub fn determinant(&self) -> i8 {
        let inversions =
            (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| self.perm[i] > self.perm[j]).count();
        let parity = if inversions % 2 == 0 { 1 } else { -1 };
        let flips = self.negate.iter().filter(|&&n| n).count();
        if flips % 2 == 0 {
            parity
        } else {
            -parity
        }
    }

    /// Source axis and sign for output axis `k`.
    pub fn source(&self, k: usize) -> (usize, bool) {
        (self.perm[k] as usize, self.negate[k])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = std::array::from_fn(|k| other.perm[self.perm[k] as usize]);
        let negate = std::array::from_fn(|k| self.negate[k] ^ other.negate[self.perm[k] as usize]);
        Self { perm, negate }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = [0u8; 3];
        let mut negate = [false; 3];
        for k in 0..3 {
            let j = self.perm[k] as usize;
            perm[j] = k as u8;
            negate[j] = self.negate[k];
        }
        Self { perm, negate }
    }

    pub fn apply(&self, v: &BlochVector) -> BlochVector {
        BlochVector::from_array(std::array::from_fn(|k| {
            let (src, neg) = self.source(k);
            let c = v.axis(src);
            if neg {
                -c
            } else {
                c.clone()
            }
        }))
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axes = ['x', 'y', 'z'];
        let parts: Vec<String> = (0..3)
            .map(|k| format!("{}{}", if self.negate[k] { "-" } else { "" }, axes[self.perm[k] as usize]))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Element of the 4608-element group acting on coefficient tables: rows
/// 1..3 transformed by `a`, columns 1..3 by `b`, then a transpose if `swap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoQubitSymmetry {
    pub a: SignedPermutation,
    pub b: SignedPermutation,
    pub swap: bool,
}

pub const GROUP_ORDER: usize = 48 * 48 * 2;

impl TwoQubitSymmetry {
    pub const IDENTITY: Self = Self { a: SignedPermutation::IDENTITY, b: SignedPermutation::IDENTITY, swap: false };

    /// Every group element, identity first.
    pub fn all() -> &'static [TwoQubitSymmetry] {
        static ALL: OnceLock<Vec<TwoQubitSymmetry>> = OnceLock::new();
        ALL.get_or_init(|| {
            let locals = SignedPermutation::all();
            let mut out = Vec::with_capacity(GROUP_ORDER);
            for &a in &locals {
                for &b in &locals {
                    for swap in [false, true] {
                        out.push(Self { a, b, swap });
                    }
                }
            }
            out
        })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        if other.swap {
            Self { a: self.b.compose(&other.a), b: self.a.compose(&other.b), swap: !self.swap }
        } else {
            Self { a: self.a.compose(&other.a), b: self.b.compose(&other.b), swap: self.swap }
        }
    }

    pub fn inverse(&self) -> Self {
        if self.swap {
            Self { a: self.b.inverse(), b: self.a.inverse(), swap: true }
        } else {
            Self { a: self.a.inverse(), b: self.b.inverse(), swap: false }
        }
    }

    /// Source cell and sign for each output cell `(i, j)`.
    fn source(&self, i: usize, j: usize) -> (usize, usize, bool) {
        let (i, j) = if self.swap { (j, i) } else { (i, j) };
        let (si, ni) = if i == 0 {
            (0, false)
        } else {
            let (s, n) = self.a.source(i - 1);
            (s + 1, n)
        };
        let (sj, nj) = if j == 0 {
            (0, false)
        } else {
            let (s, n) = self.b.source(j - 1);
            (s + 1, n)
        };
        (si, sj, ni ^ nj)
    }

    pub fn apply(&self, op: &TwoQubitOperator) -> TwoQubitOperator {
        let c = op.coeffs();
        let coeffs = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (si, sj, neg) = self.source(i, j);
                if neg {
                    -&c[si][sj]
                } else {
                    c[si][sj].clone()
                }
            })
        });
        TwoQubitOperator::from_coeffs_unchecked(coeffs)
    }

    /// Image of the product `va ⊗ vb`, as a product pair.
    pub fn apply_product(&self, va: &BlochVector, vb: &BlochVector) -> (BlochVector, BlochVector) {
        let (na, nb) = (self.a.apply(va), self.b.apply(vb));
        if self.swap {
            (nb, na)
        } else {
            (na, nb)
        }
    }
}

pub fn apply_symmetry(sym: &TwoQubitSymmetry, op: &TwoQubitOperator) -> TwoQubitOperator {
    sym.apply(op)
}

/// Lexicographically smallest orbit element under the column-stacked
/// ordering, with one group element reaching it. Canonical inputs map to
/// themselves with the identity.
pub fn canonical_form(op: &TwoQubitOperator) -> (TwoQubitOperator, TwoQubitSymmetry) {
    let c = op.coeffs();
    let mut best: Vec<Scalar> = op.flatten();
    let mut best_sym = TwoQubitSymmetry::IDENTITY;
    for sym in &TwoQubitSymmetry::all()[1..] {
        let mut replace = false;
        let mut candidate: Vec<Scalar> = Vec::with_capacity(16);
        for k in 0..16 {
            let (si, sj, neg) = sym.source(k % 4, k / 4);
            let v = if neg { -&c[si][sj] } else { c[si][sj].clone() };
            if !replace {
                match v.cmp(&best[k]) {
                    std::cmp::Ordering::Less => replace = true,
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
            candidate.push(v);
        }
        if replace {
            best = candidate;
            best_sym = *sym;
        }
    }
    let canon = TwoQubitOperator::from_flat(&best).expect("symmetries preserve normalisation");
    (canon, best_sym)
}

/// Thread-safe memo for [`canonical_form`].
#[derive(Debug, Default)]
pub struct CanonicalCache {
    map: RwLock<HashMap<TwoQubitOperator, (TwoQubitOperator, TwoQubitSymmetry)>>,
}

impl CanonicalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn canonical_form(&self, op: &TwoQubitOperator) -> (TwoQubitOperator, TwoQubitSymmetry) {
        if let Some(hit) = self.map.read().expect("cache lock poisoned").get(op) {
            return hit.clone();
        }
        let result = canonical_form(op);
        self.map.write().expect("cache lock poisoned").insert(op.clone(), result.clone());
        result
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

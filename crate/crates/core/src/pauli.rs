//! One- and two-qubit operators in the Pauli expansion.
//!
//! A two-qubit operator is stored as the 4×4 coefficient table `ρ_ij` of
//! `(1/4) Σ ρ_ij σ_i ⊗ σ_j`, with `i` indexing qubit A (rows) and `j` qubit B
//! (columns). Trace normalisation pins `ρ_00 = 1`.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{cz_matrix, CMatrix};
use crate::scalar::{approximate, int, parse_scalar, to_f64, ParseScalarError, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("noise strength {0} outside [0, 1]")]
    NoiseOutOfRange(Scalar),
    #[error("the (I, I) measurement has no outcomes")]
    TrivialMeasurement,
    #[error("Pauli index {0} out of range")]
    BadPauliIndex(u8),
    #[error("operator is not trace normalised: coefficient (0,0) is {0}")]
    NotNormalised(Scalar),
    #[error("conjugating {0} by CZ does not give a signed Pauli product")]
    NonPauliConjugate(String),
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
}

/// Index into `σ_0 = I, σ_1 = X, σ_2 = Y, σ_3 = Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: Self = Self(0);
    pub const X: Self = Self(1);
    pub const Y: Self = Self(2);
    pub const Z: Self = Self(3);
    pub const ALL: [Self; 4] = [Self::I, Self::X, Self::Y, Self::Z];
    pub const AXES: [Self; 3] = [Self::X, Self::Y, Self::Z];

    pub fn new(value: u8) -> Result<Self, AlgebraError> {
        if value < 4 {
            Ok(Self(value))
        } else {
            Err(AlgebraError::BadPauliIndex(value))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn label(self) -> &'static str {
        ["I", "X", "Y", "Z"][self.index()]
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of a single Pauli measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub const BOTH: [Self; 2] = [Self::Plus, Self::Minus];

    pub fn sign(self) -> i64 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Self::Plus => '+',
            Self::Minus => '-',
        }
    }
}

/// Single-qubit Pauli coefficients. Vectors outside the unit ball are legal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlochVector {
    #[serde(with = "crate::scalar::serde_scalar_array")]
    coords: [Scalar; 3],
}

impl BlochVector {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Self { coords: [x, y, z] }
    }

    pub fn from_array(coords: [Scalar; 3]) -> Self {
        Self { coords }
    }

    pub fn origin() -> Self {
        Self::new(Scalar::zero(), Scalar::zero(), Scalar::zero())
    }

    pub fn parse(x: &str, y: &str, z: &str) -> Result<Self, ParseScalarError> {
        Ok(Self::new(parse_scalar(x)?, parse_scalar(y)?, parse_scalar(z)?))
    }

    pub fn x(&self) -> &Scalar {
        &self.coords[0]
    }

    pub fn y(&self) -> &Scalar {
        &self.coords[1]
    }

    pub fn z(&self) -> &Scalar {
        &self.coords[2]
    }

    pub fn coords(&self) -> &[Scalar; 3] {
        &self.coords
    }

    /// Component along `axis` (0, 1, 2 for x, y, z).
    pub fn axis(&self, axis: usize) -> &Scalar {
        &self.coords[axis]
    }

    /// The extended vector `(1, x, y, z)` so that product coefficients are `a_i b_j`.
    pub fn homogeneous(&self) -> [Scalar; 4] {
        [Scalar::one(), self.coords[0].clone(), self.coords[1].clone(), self.coords[2].clone()]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [to_f64(&self.coords[0]), to_f64(&self.coords[1]), to_f64(&self.coords[2])]
    }

    pub fn norm_squared(&self) -> Scalar {
        self.coords.iter().map(|c| c * c).sum()
    }

    /// A rational point exactly on the unit sphere close to direction `d`:
    /// stereographic coordinates are rounded to denominators at most
    /// `max_den` and projected back. Used for pure magic states such as
    /// `(1,1,1)/√3`, which have no exact rational form.
    pub fn on_sphere_near(d: [f64; 3], max_den: u64) -> Self {
        let norm = d.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(norm > 0.0, "direction must be non-zero");
        let [x, y, z] = d.map(|c| c / norm);
        // Project from the pole farther from the point.
        let pole = if z >= 0.0 { 1.0 } else { -1.0 };
        let u = approximate(x / (1.0 + pole * z), max_den);
        let v = approximate(y / (1.0 + pole * z), max_den);
        let one = Scalar::one();
        let s = &u * &u + &v * &v;
        let den = &one + &s;
        let two = int(2);
        let zz = (&one - &s) / &den;
        Self::new(&two * &u / &den, &two * &v / &den, if pole > 0.0 { zz } else { -zz })
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

/// Two-qubit operator in the Pauli expansion, `coeffs[i][j] = ρ_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoQubitOperator {
    coeffs: [[Scalar; 4]; 4],
}

impl TwoQubitOperator {
    pub fn from_coeffs(coeffs: [[Scalar; 4]; 4]) -> Result<Self, AlgebraError> {
        if !coeffs[0][0].is_one() {
            return Err(AlgebraError::NotNormalised(coeffs[0][0].clone()));
        }
        Ok(Self { coeffs })
    }

    pub fn maximally_mixed() -> Self {
        let mut coeffs: [[Scalar; 4]; 4] = Default::default();
        coeffs[0][0] = Scalar::one();
        Self { coeffs }
    }

    /// Coefficients in the column-stacked order `(ρ_00, ρ_10, ρ_20, ρ_30, ρ_01, …, ρ_33)`.
    pub fn from_flat(flat: &[Scalar]) -> Result<Self, AlgebraError> {
        assert_eq!(flat.len(), 16, "flattened operator must have 16 entries");
        let mut coeffs: [[Scalar; 4]; 4] = Default::default();
        for (k, v) in flat.iter().enumerate() {
            coeffs[k % 4][k / 4] = v.clone();
        }
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[[Scalar; 4]; 4] {
        &self.coeffs
    }

    pub fn coeff(&self, a: PauliIndex, b: PauliIndex) -> &Scalar {
        &self.coeffs[a.index()][b.index()]
    }

    /// Column-stacked vector; entry `4*j + i` is `ρ_ij`.
    pub fn flatten(&self) -> Vec<Scalar> {
        (0..16).map(|k| self.coeffs[k % 4][k / 4].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut coeffs: [[Scalar; 4]; 4] = Default::default();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                coeffs[j][i] = v.clone();
            }
        }
        Self { coeffs }
    }

    /// `weight · self + (1 − weight) · other`.
    pub fn mix(&self, other: &Self, weight: &Scalar) -> Self {
        let rest = Scalar::one() - weight;
        let mut coeffs: [[Scalar; 4]; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                coeffs[i][j] = weight * &self.coeffs[i][j] + &rest * &other.coeffs[i][j];
            }
        }
        Self { coeffs }
    }

    /// Mixes towards the maximally mixed operator: non-identity entries scale by `factor`.
    pub fn scale_correlations(&self, factor: &Scalar) -> Self {
        let mut out = self.clone();
        for (i, row) in out.coeffs.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != 0 || j != 0 {
                    *v = &*v * factor;
                }
            }
        }
        out
    }

    /// Builds a normalised operator from unnormalised coefficients by a
    /// weighted sum; the caller guarantees the weights sum to one.
    pub(crate) fn weighted_sum<'a>(terms: impl IntoIterator<Item = (&'a Scalar, Self)>) -> [[Scalar; 4]; 4] {
        let mut acc: [[Scalar; 4]; 4] = Default::default();
        for (w, op) in terms {
            for i in 0..4 {
                for j in 0..4 {
                    acc[i][j] += w * &op.coeffs[i][j];
                }
            }
        }
        acc
    }

    pub(crate) fn from_coeffs_unchecked(coeffs: [[Scalar; 4]; 4]) -> Self {
        Self { coeffs }
    }
}

impl fmt::Display for TwoQubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.coeffs.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
            if i < 3 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    coeffs: [[String; 4]; 4],
}

impl Serialize for TwoQubitOperator {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let coeffs = std::array::from_fn(|i| std::array::from_fn(|j| self.coeffs[i][j].to_string()));
        OperatorRepr { coeffs }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TwoQubitOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(de)?;
        let mut coeffs: [[Scalar; 4]; 4] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                coeffs[i][j] = parse_scalar(&repr.coeffs[i][j]).map_err(serde::de::Error::custom)?;
            }
        }
        Self::from_coeffs(coeffs).map_err(serde::de::Error::custom)
    }
}

/// `a ⊗ b` as a coefficient table: `ρ_ij = a_i b_j` with `a_0 = b_0 = 1`.
pub fn product_operator(a: &BlochVector, b: &BlochVector) -> TwoQubitOperator {
    let ha = a.homogeneous();
    let hb = b.homogeneous();
    let coeffs = std::array::from_fn(|i| std::array::from_fn(|j| &ha[i] * &hb[j]));
    TwoQubitOperator { coeffs }
}

/// One entry of the CZ conjugation table: `CZ (σ_i ⊗ σ_j) CZ† = sign · σ_a ⊗ σ_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CzImage {
    pub negative: bool,
    pub a: PauliIndex,
    pub b: PauliIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzTable {
    entries: [[CzImage; 4]; 4],
}

impl CzTable {
    pub fn image(&self, a: PauliIndex, b: PauliIndex) -> CzImage {
        self.entries[a.index()][b.index()]
    }
}

/// Derives the table by conjugating the 16 dense Pauli products with the
/// dense CZ matrix and matching each result against `±σ_a ⊗ σ_b`.
pub fn derive_cz_table() -> Result<CzTable, AlgebraError> {
    let cz = cz_matrix();
    let products: Vec<Vec<CMatrix>> =
        (0..4).map(|i| (0..4).map(|j| CMatrix::pauli(i).kron(&CMatrix::pauli(j))).collect()).collect();
    let mut entries = [[CzImage { negative: false, a: PauliIndex::I, b: PauliIndex::I }; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let conj = products[i][j].conjugate_by(&cz);
            let mut found = None;
            'search: for a in 0..4 {
                for b in 0..4 {
                    for (negative, sign) in [(false, 1.0), (true, -1.0)] {
                        let candidate = products[a][b].scale(Complex64::new(sign, 0.0));
                        if conj.max_abs_diff(&candidate) < 1e-12 {
                            found = Some(CzImage { negative, a: PauliIndex(a as u8), b: PauliIndex(b as u8) });
                            break 'search;
                        }
                    }
                }
            }
            entries[i][j] = found.ok_or_else(|| {
                AlgebraError::NonPauliConjugate(format!("{}{}", PauliIndex(i as u8), PauliIndex(j as u8)))
            })?;
        }
    }
    Ok(CzTable { entries })
}

/// The CZ conjugation table, derived once per process.
pub fn cz_conjugation_table() -> &'static CzTable {
    static TABLE: OnceLock<CzTable> = OnceLock::new();
    TABLE.get_or_init(|| derive_cz_table().expect("dense CZ oracle produced a non-Pauli image"))
}

pub fn apply_cz(op: &TwoQubitOperator) -> TwoQubitOperator {
    let table = cz_conjugation_table();
    let mut coeffs: [[Scalar; 4]; 4] = Default::default();
    for a in PauliIndex::ALL {
        for b in PauliIndex::ALL {
            let img = table.image(a, b);
            let v = op.coeff(a, b);
            coeffs[img.a.index()][img.b.index()] = if img.negative { -v } else { v.clone() };
        }
    }
    TwoQubitOperator { coeffs }
}

fn check_noise(lambda: &Scalar) -> Result<(), AlgebraError> {
    if *lambda < Scalar::zero() || *lambda > Scalar::one() {
        return Err(AlgebraError::NoiseOutOfRange(lambda.clone()));
    }
    Ok(())
}

/// `(1 − λ) · CZ(op) + λ · (maximally mixed)`.
pub fn apply_noisy_cz(op: &TwoQubitOperator, lambda: &Scalar) -> Result<TwoQubitOperator, AlgebraError> {
    check_noise(lambda)?;
    Ok(apply_cz(op).scale_correlations(&(Scalar::one() - lambda)))
}

/// Probability of outcomes `(s, t)` when measuring `P` on A and `Q` on B.
/// With `P = I` (or `Q = I`) the corresponding outcome is ignored and the
/// single-qubit marginal is returned. Negative values signal a non-quantum
/// operator.
pub fn pauli_outcome_probability(
    op: &TwoQubitOperator,
    p: PauliIndex,
    q: PauliIndex,
    s: Outcome,
    t: Outcome,
) -> Result<Scalar, AlgebraError> {
    let s_val = int(s.sign());
    let t_val = int(t.sign());
    let c = &op.coeffs;
    match (p.index(), q.index()) {
        (0, 0) => Err(AlgebraError::TrivialMeasurement),
        (0, qi) => Ok((Scalar::one() + t_val * &c[0][qi]) / int(2)),
        (pi, 0) => Ok((Scalar::one() + s_val * &c[pi][0]) / int(2)),
        (pi, qi) => {
            let st = &s_val * &t_val;
            Ok((Scalar::one() + s_val * &c[pi][0] + t_val * &c[0][qi] + st * &c[pi][qi]) / int(4))
        }
    }
}

/// `(1/4) Σ ρ_ij σ_i ⊗ σ_j` as a dense matrix.
pub fn to_dense(op: &TwoQubitOperator) -> CMatrix {
    let mut out = CMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            let w = to_f64(&op.coeffs[i][j]) / 4.0;
            if w == 0.0 {
                continue;
            }
            let term = CMatrix::pauli(i).kron(&CMatrix::pauli(j)).scale(Complex64::new(w, 0.0));
            out = &out + &term;
        }
    }
    out
}

/// `(1/2)(I + xX + yY + zZ)`.
pub fn bloch_to_dense(v: &BlochVector) -> CMatrix {
    let [x, y, z] = v.to_f64();
    let mut out = CMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
    for (k, w) in [(1, x), (2, y), (3, z)] {
        out = &out + &CMatrix::pauli(k).scale(Complex64::new(w / 2.0, 0.0));
    }
    out
}

/// Pauli coefficients `tr(ρ σ_i ⊗ σ_j)` of a dense two-qubit matrix.
pub fn dense_coefficients(m: &CMatrix) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| m.trace_product_re(&CMatrix::pauli(i).kron(&CMatrix::pauli(j)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use proptest::prelude::*;

    fn v(x: Scalar, y: Scalar, z: Scalar) -> BlochVector {
        BlochVector::new(x, y, z)
    }

    fn half() -> Scalar {
        ratio(1, 2)
    }

    #[test]
    fn product_of_origins_is_maximally_mixed() {
        let o = BlochVector::origin();
        assert_eq!(product_operator(&o, &o), TwoQubitOperator::maximally_mixed());
    }

    #[test]
    fn rho1_at_half() {
        let e = v(int(1), int(1), half());
        let rho1 = product_operator(&e, &e);
        assert_eq!(rho1.coeffs()[1][1], int(1));
        assert_eq!(rho1.coeffs()[3][3], ratio(1, 4));
        assert_eq!(rho1.coeffs()[1][3], half());
        assert_eq!(rho1.coeffs()[0][0], int(1));
    }

    #[test]
    fn product_is_rank_one_table() {
        let r = ratio(1, 3);
        let a = v(int(1), r.clone(), int(1));
        let b = v(r.clone(), int(1), int(1));
        let op = product_operator(&a, &b);
        // Rows (1,r,1,1), (1,r,1,1), (r,r²,r,r), (1,r,1,1).
        let r2 = &r * &r;
        let expected = [
            [int(1), r.clone(), int(1), int(1)],
            [int(1), r.clone(), int(1), int(1)],
            [r.clone(), r2, r.clone(), r.clone()],
            [int(1), r.clone(), int(1), int(1)],
        ];
        assert_eq!(op.coeffs(), &expected);
    }

    #[test]
    fn cz_table_entries() {
        let t = cz_conjugation_table();
        let img = |a, b| {
            let i = t.image(PauliIndex(a), PauliIndex(b));
            (if i.negative { -1 } else { 1 }, i.a.0, i.b.0)
        };
        assert_eq!(img(0, 0), (1, 0, 0));
        assert_eq!(img(3, 0), (1, 3, 0));
        assert_eq!(img(1, 0), (1, 1, 3));
        assert_eq!(img(0, 1), (1, 3, 1));
        assert_eq!(img(1, 1), (1, 2, 2));
        assert_eq!(img(1, 2), (-1, 2, 1));
        // Involution up to sign: image of image is the original with sign +1.
        for a in 0..4 {
            for b in 0..4 {
                let (s1, a1, b1) = img(a, b);
                let (s2, a2, b2) = img(a1, b1);
                assert_eq!((s1 * s2, a2, b2), (1, a, b));
            }
        }
    }

    #[test]
    fn cz_moves_x_marginal_into_correlation() {
        let op = product_operator(&v(int(1), int(0), int(0)), &BlochVector::origin());
        let out = apply_cz(&op);
        assert_eq!(out.coeffs()[1][3], int(1));
        assert_eq!(out.coeffs()[1][0], int(0));
        assert_eq!(apply_cz(&TwoQubitOperator::maximally_mixed()), TwoQubitOperator::maximally_mixed());
    }

    #[test]
    fn cz_involution_on_rho2() {
        let rho2 = product_operator(&v(half(), int(1), int(1)), &v(int(1), int(1), half()));
        assert_eq!(apply_cz(&apply_cz(&rho2)), rho2);
    }

    #[test]
    fn noisy_cz_limits() {
        let r = half();
        let rho4 = product_operator(&v(r.clone(), int(1), int(1)), &v(int(1), r.clone(), int(1)));
        assert_eq!(apply_noisy_cz(&rho4, &int(1)).unwrap(), TwoQubitOperator::maximally_mixed());
        assert_eq!(apply_noisy_cz(&rho4, &int(0)).unwrap(), apply_cz(&rho4));
        assert!(matches!(apply_noisy_cz(&rho4, &ratio(3, 2)), Err(AlgebraError::NoiseOutOfRange(_))));
        assert!(apply_noisy_cz(&rho4, &ratio(-1, 2)).is_err());
    }

    #[test]
    fn outcome_probabilities() {
        let mixed = TwoQubitOperator::maximally_mixed();
        for p in PauliIndex::AXES {
            for q in PauliIndex::AXES {
                for s in Outcome::BOTH {
                    for t in Outcome::BOTH {
                        assert_eq!(pauli_outcome_probability(&mixed, p, q, s, t).unwrap(), ratio(1, 4));
                    }
                }
            }
        }
        let e = v(int(1), int(1), half());
        let rho1 = product_operator(&e, &e);
        let p = pauli_outcome_probability(&rho1, PauliIndex::X, PauliIndex::X, Outcome::Plus, Outcome::Plus);
        assert_eq!(p.unwrap(), int(1));
        assert_eq!(
            pauli_outcome_probability(&mixed, PauliIndex::I, PauliIndex::I, Outcome::Plus, Outcome::Plus),
            Err(AlgebraError::TrivialMeasurement)
        );
        let marginal = pauli_outcome_probability(&rho1, PauliIndex::I, PauliIndex::Z, Outcome::Minus, Outcome::Minus);
        assert_eq!(marginal.unwrap(), ratio(1, 4));
    }

    #[test]
    fn dense_forms() {
        let mixed = to_dense(&TwoQubitOperator::maximally_mixed());
        assert!(mixed.max_abs_diff(&CMatrix::identity(4).scale(Complex64::new(0.25, 0.0))) < 1e-15);
        let up = bloch_to_dense(&v(int(0), int(0), int(1)));
        assert!(up.max_abs_diff(&CMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])) < 1e-15);
        let a = v(int(1), int(1), half());
        let d = to_dense(&product_operator(&a, &a));
        assert!((d.trace().re - 1.0).abs() < 1e-14);
        let kron = bloch_to_dense(&a).kron(&bloch_to_dense(&a));
        assert!(d.max_abs_diff(&kron) < 1e-14);
    }

    #[test]
    fn rejects_unnormalised() {
        let mut coeffs: [[Scalar; 4]; 4] = Default::default();
        coeffs[0][0] = int(2);
        assert!(matches!(TwoQubitOperator::from_coeffs(coeffs), Err(AlgebraError::NotNormalised(_))));
    }

    #[test]
    fn sphere_points_are_exact() {
        for d in [[1.0, 1.0, 1.0], [1.0, 1.0, 0.0], [0.0, 0.0, -1.0], [-0.3, 0.8, -0.2], [0.0, 0.0, 1.0]] {
            let v = BlochVector::on_sphere_near(d, 1000);
            assert_eq!(v.norm_squared(), Scalar::one());
            let n = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            for (got, want) in v.to_f64().iter().zip(d) {
                assert!((got - want / n).abs() < 1e-4, "{v} vs {d:?}");
            }
        }
    }

    #[test]
    fn json_layout() {
        let op = product_operator(&v(int(1), int(0), int(0)), &v(int(0), int(0), half()));
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.starts_with(r#"{"coeffs":[["1","0","0","1/2"],["1","0","0","1/2"]"#), "{json}");
        let back: TwoQubitOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
    }

    fn small_rational() -> impl Strategy<Value = Scalar> {
        (-8i64..=8, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
    }

    pub(crate) fn arb_operator() -> impl Strategy<Value = TwoQubitOperator> {
        proptest::collection::vec(small_rational(), 15).prop_map(|vals| {
            let mut coeffs: [[Scalar; 4]; 4] = Default::default();
            coeffs[0][0] = int(1);
            for (k, val) in vals.into_iter().enumerate() {
                coeffs[(k + 1) / 4][(k + 1) % 4] = val;
            }
            TwoQubitOperator::from_coeffs(coeffs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn cz_is_linear(a in arb_operator(), b in arb_operator(), n in 0i64..=6) {
            let alpha = ratio(n, 6);
            prop_assert_eq!(apply_cz(&a.mix(&b, &alpha)), apply_cz(&a).mix(&apply_cz(&b), &alpha));
        }

        #[test]
        fn cz_is_involution(a in arb_operator()) {
            prop_assert_eq!(apply_cz(&apply_cz(&a)), a);
        }

        #[test]
        fn outcome_probabilities_sum_to_one(a in arb_operator(), p in 1u8..4, q in 1u8..4) {
            let (p, q) = (PauliIndex(p), PauliIndex(q));
            let mut total = Scalar::zero();
            for s in Outcome::BOTH {
                for t in Outcome::BOTH {
                    total += pauli_outcome_probability(&a, p, q, s, t).unwrap();
                }
            }
            prop_assert_eq!(total, int(1));
        }

        #[test]
        fn flatten_round_trip(a in arb_operator()) {
            prop_assert_eq!(TwoQubitOperator::from_flat(&a.flatten()).unwrap(), a);
        }
    }
}

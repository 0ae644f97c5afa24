//! The separability program for noisy CZ outputs over `TRUN(r)` products.
//!
//! Column 0 is `CZ(ρ) − (maximally mixed)` so its weight is the noise level;
//! columns `1 + 24a + b` are the product extrema `e_a ⊗ e_b`. The right-hand
//! side is `CZ(ρ)` and the objective minimises the weight of column 0. The
//! `(0,0)` row forces the product weights to sum to one.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::linalg::column_rank;
use super::simplex::{simplex_solve, BasicSolution, LinearProgram, LpError};
use crate::pauli::{apply_cz, product_operator, BlochVector, TwoQubitOperator};
use crate::scalar::Scalar;
use crate::state_sets::{Case, TruncatedCube};

pub const NOISE_COLUMN: usize = 0;

/// Column index of the product `extrema[a] ⊗ extrema[b]`.
pub fn product_column(a: usize, b: usize) -> usize {
    1 + 24 * a + b
}

/// Inverse of [`product_column`].
pub fn product_pair(column: usize) -> (usize, usize) {
    debug_assert!(column >= 1);
    ((column - 1) / 24, (column - 1) % 24)
}

/// Builds the program for the ideal output `target = CZ(ρ)`.
pub fn build_separability_lp(target: &TwoQubitOperator, cube: &TruncatedCube) -> LinearProgram {
    let ext = cube.extrema();
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(1 + ext.len() * ext.len());
    let mut noise = target.flatten();
    noise[0] = Scalar::zero();
    columns.push(noise);
    for a in &ext {
        for b in &ext {
            columns.push(product_operator(a, b).flatten());
        }
    }
    let mut objective = vec![Scalar::zero(); columns.len()];
    objective[NOISE_COLUMN] = Scalar::one();
    let constraints = (0..16).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    LinearProgram { objective, constraints, rhs: target.flatten() }
}

/// Feasibility program over the 576 product columns only.
fn build_membership_lp(op: &TwoQubitOperator, cube: &TruncatedCube) -> LinearProgram {
    let ext = cube.extrema();
    let columns: Vec<Vec<Scalar>> =
        ext.iter().flat_map(|a| ext.iter().map(move |b| product_operator(a, b).flatten())).collect();
    let constraints = (0..16).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    LinearProgram { objective: vec![Scalar::zero(); columns.len()], constraints, rhs: op.flatten() }
}

/// One weighted product of extrema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductTerm {
    #[serde(with = "crate::scalar::serde_scalar")]
    pub p: Scalar,
    #[serde(rename = "eA")]
    pub a: BlochVector,
    #[serde(rename = "eB")]
    pub b: BlochVector,
}

pub fn recombine(terms: &[ProductTerm]) -> [[Scalar; 4]; 4] {
    TwoQubitOperator::weighted_sum(terms.iter().map(|t| (&t.p, product_operator(&t.a, &t.b))))
}

/// What a certificate certifies: a canonical case, or an arbitrary input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateTarget {
    Case(Case),
    /// The pre-gate input operator.
    Custom(TwoQubitOperator),
}

/// Convex decomposition of `(1 − λ)·CZ(ρ) + λ·(maximally mixed)` into
/// products of `TRUN(r)` extrema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparableCertificate {
    pub r: Scalar,
    pub lambda: Scalar,
    pub target: CertificateTarget,
    pub terms: Vec<ProductTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("truncation parameter r = {0} is outside (0, 1]")]
    BadTruncation(Scalar),
    #[error("noise level {0} is outside [0, 1]")]
    BadNoise(Scalar),
    #[error("term {index}: {side} vector {vector} is not an extremum of TRUN({r})")]
    NotExtremal { index: usize, side: &'static str, vector: BlochVector, r: Scalar },
    #[error("term {index}: weight {p} is not positive")]
    NonPositiveWeight { index: usize, p: Scalar },
    #[error("weights sum to {0}, not 1")]
    WeightSum(Scalar),
    #[error(
        "decomposition differs from the noisy CZ output at coefficient ({i},{j}): expected {expected}, got {actual}"
    )]
    Mismatch { i: usize, j: usize, expected: Scalar, actual: Scalar },
    #[error("certificate is for {found}, expected case {expected}")]
    WrongTarget { expected: Case, found: String },
}

impl SeparableCertificate {
    pub fn input_operator(&self) -> TwoQubitOperator {
        match &self.target {
            CertificateTarget::Case(c) => c.input_operator(&self.r),
            CertificateTarget::Custom(op) => op.clone(),
        }
    }

    /// `(1 − λ)·CZ(ρ) + λ·(maximally mixed)` for the certified input.
    pub fn certified_operator(&self) -> TwoQubitOperator {
        apply_cz(&self.input_operator()).scale_correlations(&(Scalar::one() - &self.lambda))
    }

    /// Exact validity check; reports the first violated condition.
    pub fn check(&self) -> Result<(), CertificateError> {
        let cube = TruncatedCube::new(self.r.clone()).map_err(|_| CertificateError::BadTruncation(self.r.clone()))?;
        if self.lambda.is_negative() || self.lambda > Scalar::one() {
            return Err(CertificateError::BadNoise(self.lambda.clone()));
        }
        for (index, t) in self.terms.iter().enumerate() {
            for (side, v) in [("A", &t.a), ("B", &t.b)] {
                if !cube.is_extremum(v) {
                    return Err(CertificateError::NotExtremal { index, side, vector: v.clone(), r: self.r.clone() });
                }
            }
            if !t.p.is_positive() {
                return Err(CertificateError::NonPositiveWeight { index, p: t.p.clone() });
            }
        }
        let total: Scalar = self.terms.iter().map(|t| t.p.clone()).sum();
        if !total.is_one() {
            return Err(CertificateError::WeightSum(total));
        }
        let expected = self.certified_operator();
        let actual = recombine(&self.terms);
        for i in 0..4 {
            for j in 0..4 {
                if expected.coeffs()[i][j] != actual[i][j] {
                    return Err(CertificateError::Mismatch {
                        i,
                        j,
                        expected: expected.coeffs()[i][j].clone(),
                        actual: actual[i][j].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Re-expresses the certificate at a higher noise level `λ' ≥ λ` by
    /// mixing in `(0,0,0)⊗(0,0,0)`, itself written as the uniform mixture
    /// of `(±e)⊗(±e)` for the extremum `e = (1,1,r)`.
    pub fn diluted(&self, lambda: &Scalar) -> SeparableCertificate {
        assert!(*lambda >= self.lambda && *lambda <= Scalar::one(), "can only add noise");
        if *lambda == self.lambda {
            return self.clone();
        }
        let one = Scalar::one();
        let keep = (&one - lambda) / (&one - &self.lambda);
        let rest = (&one - &keep) / Scalar::from_integer(4.into());
        let e = BlochVector::new(one.clone(), one.clone(), self.r.clone());
        let neg = BlochVector::from_array(e.coords().clone().map(|c| -c));
        let mut terms: Vec<ProductTerm> = self
            .terms
            .iter()
            .filter(|_| keep.is_positive())
            .map(|t| ProductTerm { p: &t.p * &keep, a: t.a.clone(), b: t.b.clone() })
            .collect();
        for a in [&e, &neg] {
            for b in [&e, &neg] {
                terms.push(ProductTerm { p: rest.clone(), a: a.clone(), b: b.clone() });
            }
        }
        SeparableCertificate { r: self.r.clone(), lambda: lambda.clone(), target: self.target.clone(), terms }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TargetRepr {
    Case(u8),
    Custom(String),
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    #[serde(with = "crate::scalar::serde_scalar")]
    r: Scalar,
    #[serde(with = "crate::scalar::serde_scalar")]
    lambda: Scalar,
    case: TargetRepr,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    input: Option<TwoQubitOperator>,
    terms: Vec<ProductTerm>,
}

impl Serialize for SeparableCertificate {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let (case, input) = match &self.target {
            CertificateTarget::Case(c) => (TargetRepr::Case(c.number()), None),
            CertificateTarget::Custom(op) => (TargetRepr::Custom("custom".into()), Some(op.clone())),
        };
        CertificateRepr { r: self.r.clone(), lambda: self.lambda.clone(), case, input, terms: self.terms.clone() }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SeparableCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = CertificateRepr::deserialize(de)?;
        let target = match (repr.case, repr.input) {
            (TargetRepr::Case(n), _) => {
                CertificateTarget::Case(Case::from_number(n).ok_or_else(|| D::Error::custom("case must be 1..=4"))?)
            }
            (TargetRepr::Custom(s), Some(op)) if s == "custom" => CertificateTarget::Custom(op),
            (TargetRepr::Custom(_), _) => {
                return Err(D::Error::custom(r#"custom certificates need "case": "custom" and an "input" operator"#))
            }
        };
        Ok(Self { r: repr.r, lambda: repr.lambda, target, terms: repr.terms })
    }
}

/// Result of [`min_noise`].
#[derive(Debug, Clone)]
pub struct NoiseOptimum {
    pub lambda: Scalar,
    pub certificate: SeparableCertificate,
    /// The sparsified optimal basic solution of the program.
    pub solution: BasicSolution,
}

/// Exact weights for `Σ w_k · columns[k] = target` on a linearly independent
/// support. Negative weights are reported with their index.
pub fn rational_certificate(columns: &[Vec<Scalar>], target: &[Scalar]) -> Result<Vec<Scalar>, LpError> {
    let weights = super::linalg::solve_columns(columns, target)?;
    if let Some((index, value)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
        return Err(LpError::NegativeWeight { index, value: value.clone() });
    }
    Ok(weights)
}

/// Reduces an optimal solution to one on linearly independent columns by
/// deleting support columns one at a time (heaviest first) and keeping each
/// deletion only if the optimum is still reached.
pub fn sparsify_support(sol: &BasicSolution, lp: &LinearProgram) -> Result<BasicSolution, LpError> {
    let support = sol.support();
    let cols: Vec<Vec<Scalar>> = support.iter().map(|&j| lp.column(j)).collect();
    if column_rank(&cols) == support.len() {
        return Ok(sol.clone());
    }
    let mut order: Vec<(usize, Scalar)> = sol.weights.iter().map(|(&j, w)| (j, w.clone())).collect();
    order.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));

    let mut allowed: Vec<usize> = support.clone();
    let mut current = sol.clone();
    for (column, _) in order {
        let trial: Vec<usize> = allowed.iter().copied().filter(|&j| j != column).collect();
        let sub = lp.restrict(&trial);
        match simplex_solve(&sub) {
            Ok(s) if s.objective == sol.objective => {
                current = remap(&s, &trial);
                allowed = trial;
            }
            Ok(_) | Err(LpError::Infeasible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    // A final solve over what survived yields a basic, hence independent, support.
    let sub = lp.restrict(&allowed);
    let last = simplex_solve(&sub)?;
    if last.objective == sol.objective {
        current = remap(&last, &allowed);
    }
    Ok(current)
}

fn remap(sol: &BasicSolution, columns: &[usize]) -> BasicSolution {
    BasicSolution {
        objective: sol.objective.clone(),
        weights: sol.weights.iter().map(|(&k, w)| (columns[k], w.clone())).collect(),
        basis: {
            let mut b: Vec<usize> = sol.basis.iter().map(|&k| columns[k]).collect();
            b.sort_unstable();
            b
        },
    }
}

fn terms_from_weights(weights: impl IntoIterator<Item = (usize, Scalar)>, ext: &[BlochVector]) -> Vec<ProductTerm> {
    weights
        .into_iter()
        .filter(|(j, _)| *j != NOISE_COLUMN)
        .map(|(j, p)| {
            let (a, b) = product_pair(j);
            ProductTerm { p, a: ext[a].clone(), b: ext[b].clone() }
        })
        .collect()
}

/// Minimal noise making `C_λ(input)` separable, with an exact certificate.
pub fn min_noise(input: &TwoQubitOperator, cube: &TruncatedCube) -> Result<NoiseOptimum, LpError> {
    min_noise_for(CertificateTarget::Custom(input.clone()), input, cube)
}

/// [`min_noise`] for a canonical case, labelling the certificate accordingly.
pub fn min_noise_case(case: Case, cube: &TruncatedCube) -> Result<NoiseOptimum, LpError> {
    min_noise_for(CertificateTarget::Case(case), &case.input_operator(cube.r()), cube)
}

fn min_noise_for(
    target: CertificateTarget,
    input: &TwoQubitOperator,
    cube: &TruncatedCube,
) -> Result<NoiseOptimum, LpError> {
    let ideal = apply_cz(input);
    let lp = build_separability_lp(&ideal, cube);
    let raw = simplex_solve(&lp)?;
    let solution = sparsify_support(&raw, &lp)?;

    // Rebuild the weights by an exact solve on the support.
    let support = solution.support();
    let columns: Vec<Vec<Scalar>> = support.iter().map(|&j| lp.column(j)).collect();
    let weights = rational_certificate(&columns, &lp.rhs)?;
    debug_assert!(support.iter().zip(&weights).all(|(&j, w)| solution.value(j) == *w));

    let lambda = solution.value(NOISE_COLUMN);
    let ext = cube.extrema();
    let terms = terms_from_weights(support.into_iter().zip(weights), &ext);
    let total: Scalar = terms.iter().map(|t| t.p.clone()).sum();
    assert!(total.is_one(), "product weights must sum to one, got {total}");
    let certificate = SeparableCertificate { r: cube.r().clone(), lambda: lambda.clone(), target, terms };
    Ok(NoiseOptimum { lambda, certificate, solution })
}

/// A product decomposition of `op` when one exists.
pub fn separable_decomposition(
    op: &TwoQubitOperator,
    cube: &TruncatedCube,
) -> Result<Option<Vec<ProductTerm>>, LpError> {
    let lp = build_membership_lp(op, cube);
    match simplex_solve(&lp) {
        Ok(sol) => {
            let ext = cube.extrema();
            // Membership columns carry no noise column; shift by one.
            Ok(Some(terms_from_weights(sol.weights.into_iter().map(|(j, w)| (j + 1, w)), &ext)))
        }
        Err(LpError::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn is_separable(op: &TwoQubitOperator, cube: &TruncatedCube) -> Result<bool, LpError> {
    Ok(separable_decomposition(op, cube)?.is_some())
}

use std::collections::HashMap;

use num_traits::One;
use rayon::prelude::*;

use super::SimError;
use crate::lp::{min_noise_case, ProductTerm, SeparableCertificate};
use crate::pauli::{apply_cz, product_operator, BlochVector, TwoQubitOperator};
use crate::scalar::{probability_threshold, Scalar};
use crate::state_sets::{canonical_form, Case, TruncatedCube, TwoQubitSymmetry};

/// Decomposition served for one extremal input pair.
#[derive(Debug, Clone)]
pub struct PairDecomposition {
    pub case: Case,
    /// Maps the case's output onto this pair's output.
    pub transport: TwoQubitSymmetry,
    pub terms: Vec<ProductTerm>,
    /// `ceil(2^64 · cumulative weight)` per term; the last is `2^64`.
    pub(crate) thresholds: Vec<u128>,
}

/// Separable decompositions of `C_{λ*}(e_A ⊗ e_B)` for all 576 extremal
/// pairs, where `λ*` is the largest of the four case optima.
#[derive(Debug, Clone)]
pub struct DecompositionTable {
    cube: TruncatedCube,
    extrema: Vec<BlochVector>,
    extremum_index: HashMap<BlochVector, usize>,
    lambda_star: Scalar,
    case_lambdas: [Scalar; 4],
    certificates: Vec<SeparableCertificate>,
    pairs: Vec<PairDecomposition>,
}

pub(crate) fn cumulative_thresholds<'a>(weights: impl IntoIterator<Item = &'a Scalar>) -> Vec<u128> {
    let mut acc = Scalar::from_integer(0.into());
    weights
        .into_iter()
        .map(|w| {
            acc += w;
            probability_threshold(&acc)
        })
        .collect()
}

/// Solves the four case programs, dilutes every certificate to the common
/// noise level, and transports them to every extremal pair.
pub fn build_decomposition_table(r: &Scalar) -> Result<DecompositionTable, SimError> {
    let cube = TruncatedCube::new(r.clone())?;
    let optima = Case::ALL.par_iter().map(|&c| min_noise_case(c, &cube)).collect::<Result<Vec<_>, _>>()?;
    let case_lambdas: [Scalar; 4] = std::array::from_fn(|k| optima[k].lambda.clone());
    let lambda_star = case_lambdas.iter().max().expect("four cases").clone();
    let certificates: Vec<SeparableCertificate> = optima.iter().map(|o| o.certificate.diluted(&lambda_star)).collect();

    let case_canon: Vec<(TwoQubitOperator, TwoQubitSymmetry)> =
        Case::ALL.iter().map(|c| canonical_form(&apply_cz(&c.input_operator(r)))).collect();
    let extrema = cube.extrema();
    let n = extrema.len();
    let pairs = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (idx / n, idx % n);
            let (canon, g) = canonical_form(&apply_cz(&product_operator(&extrema[a], &extrema[b])));
            let k = case_canon
                .iter()
                .position(|(c, _)| *c == canon)
                .ok_or_else(|| SimError::Internal(format!("pair ({a}, {b}) matches no canonical case")))?;
            let transport = g.inverse().compose(&case_canon[k].1);
            let terms: Vec<ProductTerm> = certificates[k]
                .terms
                .iter()
                .map(|t| {
                    let (na, nb) = transport.apply_product(&t.a, &t.b);
                    ProductTerm { p: t.p.clone(), a: na, b: nb }
                })
                .collect();
            let thresholds = cumulative_thresholds(terms.iter().map(|t| &t.p));
            Ok(PairDecomposition { case: Case::ALL[k], transport, terms, thresholds })
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    let mut extremum_index = HashMap::new();
    for (k, e) in extrema.iter().enumerate() {
        extremum_index.entry(e.clone()).or_insert(k);
    }
    Ok(DecompositionTable { cube, extrema, extremum_index, lambda_star, case_lambdas, certificates, pairs })
}

impl DecompositionTable {
    pub fn r(&self) -> &Scalar {
        self.cube.r()
    }

    pub fn cube(&self) -> &TruncatedCube {
        &self.cube
    }

    pub fn lambda_star(&self) -> &Scalar {
        &self.lambda_star
    }

    pub fn case_lambda(&self, case: Case) -> &Scalar {
        &self.case_lambdas[case.number() as usize - 1]
    }

    /// The case certificate, diluted to `λ*`.
    pub fn certificate(&self, case: Case) -> &SeparableCertificate {
        &self.certificates[case.number() as usize - 1]
    }

    pub fn extrema(&self) -> &[BlochVector] {
        &self.extrema
    }

    /// First index of `v` in [`TruncatedCube::extrema`], if extremal.
    pub fn extremum_index(&self, v: &BlochVector) -> Option<usize> {
        self.extremum_index.get(v).copied()
    }

    /// Decomposition for extrema `(a, b)` by index.
    pub fn pair(&self, a: usize, b: usize) -> &PairDecomposition {
        &self.pairs[a * self.extrema.len() + b]
    }

    /// Expected operator of the pair's decomposition; equals
    /// `C_{λ*}(e_a ⊗ e_b)` exactly.
    pub fn reconstruct(&self, a: usize, b: usize) -> TwoQubitOperator {
        let coeffs = crate::lp::recombine(&self.pair(a, b).terms);
        TwoQubitOperator::from_coeffs(coeffs).expect("weights sum to one")
    }

    /// Probability of replacing a `C_{λ*}` sample by the maximally mixed
    /// state to reach `λ`: `(λ − λ*)/(1 − λ*)`.
    pub fn excess_probability(&self, lambda: &Scalar) -> Result<Scalar, SimError> {
        if *lambda < self.lambda_star || *lambda > Scalar::one() {
            return Err(SimError::BelowThreshold { lambda: lambda.clone(), required: self.lambda_star.clone() });
        }
        let one = Scalar::one();
        Ok((lambda - &self.lambda_star) / (&one - &self.lambda_star))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::apply_noisy_cz;
    use crate::scalar::{int, ratio};

    #[test]
    fn cumulative_ends_at_one() {
        let t = cumulative_thresholds(&[ratio(1, 3), ratio(1, 6), ratio(1, 2)]);
        assert_eq!(t.len(), 3);
        assert_eq!(t[2], 1u128 << 64);
        assert!(t[0] < t[1] && t[1] < t[2]);
    }

    #[test]
    fn table_at_one_reconstructs() {
        let table = build_decomposition_table(&int(1)).unwrap();
        assert_eq!(table.lambda_star(), &ratio(2, 3));
        let ext = table.extrema();
        for (a, b) in [(0, 0), (3, 17), (23, 5)] {
            let expected = apply_noisy_cz(&product_operator(&ext[a], &ext[b]), table.lambda_star()).unwrap();
            assert_eq!(table.reconstruct(a, b), expected);
        }
        assert!(table.excess_probability(&ratio(1, 2)).is_err());
        assert_eq!(table.excess_probability(&int(1)).unwrap(), int(1));
    }
}

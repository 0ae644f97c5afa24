//! Noise thresholds for the four canonical cases: LP optima, Pauli
//! positivity lower bounds, closed-form achievable values, the `r` sweep,
//! breakpoint bracketing, and certificate construction and checking.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lp::{min_noise_case, CertificateError, CertificateTarget, LpError, ProductTerm, SeparableCertificate};
use crate::pauli::{apply_cz, pauli_outcome_probability, BlochVector, Outcome, PauliIndex, TwoQubitOperator};
use crate::scalar::{int, ratio, to_decimal, Scalar};
use crate::state_sets::{Case, StateSetError, TruncatedCube};

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    StateSet(#[from] StateSetError),
    #[error("invalid certificate: {0}")]
    Certificate(#[from] CertificateError),
    #[error("case {case} at r = {r}: LP optimum {lp} differs from the closed form {formula}")]
    FormulaViolation { case: Case, r: Scalar, lp: Scalar, formula: Scalar },
    #[error("r = {r} is outside the regeneration window [{lo}, {hi}]")]
    OutsideWindow { r: Scalar, lo: Scalar, hi: Scalar },
    #[error("case 4 uses the hand-built decomposition, not LP regeneration")]
    NotRegenerable,
    #[error("certificate support has {0} product terms; at most 16 columns expected")]
    SupportTooLarge(usize),
    #[error("no breakpoint for case {case} in [{lo}, {hi}]: gap sign does not change")]
    NoBreakpoint { case: Case, lo: Scalar, hi: Scalar },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Default `r` window in which the LP regeneration is expected to match
/// the closed forms.
pub fn regeneration_window() -> (Scalar, Scalar) {
    (ratio(2, 5), ratio(3, 5))
}

/// A single positivity condition and the noise level it forces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub p: String,
    pub q: String,
    /// `None` for the identity side of a marginal.
    pub s: Option<Outcome>,
    pub t: Option<Outcome>,
    /// Least `λ` keeping this probability nonnegative; `None` if it is
    /// nonnegative for every `λ ∈ [0, 1]`.
    #[serde(serialize_with = "serialize_opt_scalar")]
    pub bound: Option<Scalar>,
}

fn serialize_opt_scalar<S: serde::Serializer>(v: &Option<Scalar>, ser: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser.collect_str(x),
        None => ser.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub entries: Vec<WitnessEntry>,
}

impl WitnessReport {
    /// Entries attaining the largest bound.
    pub fn binding(&self) -> Vec<&WitnessEntry> {
        let best = self.entries.iter().filter_map(|e| e.bound.as_ref()).max();
        match best {
            Some(b) => self.entries.iter().filter(|e| e.bound.as_ref() == Some(b)).collect(),
            None => Vec::new(),
        }
    }
}

/// Zero of the affine function through `(0, at_zero)` and `(1, at_one)`,
/// when `at_zero < 0 < at_one`.
fn affine_root(at_zero: &Scalar, at_one: &Scalar) -> Option<Scalar> {
    if at_zero.is_negative() && at_one.is_positive() {
        Some(at_zero / (at_zero - at_one))
    } else {
        None
    }
}

/// Noise lower bound from nonnegativity of every Pauli outcome probability
/// (36 correlated plus 12 marginal conditions) on `C_λ(ρ_k)`.
pub fn pauli_witness_bound(case: Case, cube: &TruncatedCube) -> (Scalar, WitnessReport) {
    let ideal = apply_cz(&case.input_operator(cube.r()));
    let mixed = TwoQubitOperator::maximally_mixed();
    let mut entries = Vec::with_capacity(48);
    let eval =
        |op: &TwoQubitOperator, p, q, s, t| pauli_outcome_probability(op, p, q, s, t).expect("non-trivial measurement");
    let mut push = |p: PauliIndex, q: PauliIndex, s: Option<Outcome>, t: Option<Outcome>| {
        let (ss, tt) = (s.unwrap_or(Outcome::Plus), t.unwrap_or(Outcome::Plus));
        let bound = affine_root(&eval(&ideal, p, q, ss, tt), &eval(&mixed, p, q, ss, tt));
        entries.push(WitnessEntry { p: p.label().into(), q: q.label().into(), s, t, bound });
    };
    for p in PauliIndex::AXES {
        for q in PauliIndex::AXES {
            for s in Outcome::BOTH {
                for t in Outcome::BOTH {
                    push(p, q, Some(s), Some(t));
                }
            }
        }
    }
    for axis in PauliIndex::AXES {
        for o in Outcome::BOTH {
            push(axis, PauliIndex::I, Some(o), None);
            push(PauliIndex::I, axis, None, Some(o));
        }
    }
    let best = entries.iter().filter_map(|e| e.bound.clone()).max().unwrap_or_else(Scalar::zero);
    (best, WitnessReport { entries })
}

/// Stronger necessary condition from products of `TRUN(r)` facet
/// functionals: `f_A(a)·f_B(b) ≥ 0` on every product of cube points, hence on
/// every separable operator. Not part of the Pauli witness family and not
/// used for any reported threshold.
pub fn facet_pair_witness_bound(case: Case, cube: &TruncatedCube) -> Scalar {
    let ideal = apply_cz(&case.input_operator(cube.r()));
    let facets = cube.facets();
    let homogeneous = |f: &crate::state_sets::Facet| -> [Scalar; 4] {
        [f.bound.clone(), int(-f.normal[0]), int(-f.normal[1]), int(-f.normal[2])]
    };
    let mut best = Scalar::zero();
    for fa in &facets {
        let alpha = homogeneous(fa);
        for fb in &facets {
            let beta = homogeneous(fb);
            let mut at_zero = Scalar::zero();
            for i in 0..4 {
                for j in 0..4 {
                    at_zero += &alpha[i] * &beta[j] * &ideal.coeffs()[i][j];
                }
            }
            let at_one = &alpha[0] * &beta[0];
            if let Some(b) = affine_root(&at_zero, &at_one) {
                if b > best {
                    best = b;
                }
            }
        }
    }
    best
}

/// The lower bound expected from positivity: `1 − 1/(1+2r)` for cases 1
/// and 3, `1 − 1/(2+r²)` for cases 2 and 4. For case 3 this is the Pauli
/// bound only when `r ≥ √2 − 1`; below that `1 − 1/(2−r²)` is larger.
pub fn witness_formula(case: Case, r: &Scalar) -> Scalar {
    let one = Scalar::one();
    match case {
        Case::One | Case::Three => &one - &one / (&one + int(2) * r),
        Case::Two | Case::Four => &one - &one / (int(2) + r * r),
    }
}

/// Case 1 achievable noise `(4r²+8r+12)/(r⁴+2r³+9r²+16r+20)`.
pub fn case1_formula(r: &Scalar) -> Scalar {
    let r2 = r * r;
    let r3 = &r2 * r;
    let r4 = &r3 * r;
    let num = int(4) * &r2 + int(8) * r + int(12);
    let den = &r4 + int(2) * &r3 + int(9) * &r2 + int(16) * r + int(20);
    num / den
}

/// The same value written as `1 − (r⁴+2r³+5r²+8r+8)/(r⁴+2r³+9r²+16r+20)`.
pub fn case1_formula_complement(r: &Scalar) -> Scalar {
    let r2 = r * r;
    let r3 = &r2 * r;
    let r4 = &r3 * r;
    let num = &r4 + int(2) * &r3 + int(5) * &r2 + int(8) * r + int(8);
    let den = &r4 + int(2) * &r3 + int(9) * &r2 + int(16) * r + int(20);
    Scalar::one() - num / den
}

/// Closed-form achievable noise per case. Cases 1–3 are only established
/// near `r = 1/2`; case 4 holds for all `r`.
pub fn analytic_threshold(case: Case, r: &Scalar) -> Scalar {
    match case {
        Case::One => case1_formula(r),
        other => witness_formula(other, r),
    }
}

/// One row of the sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseThreshold {
    pub case: Case,
    pub r: Scalar,
    pub lambda_lp: Scalar,
    pub lambda_witness: Scalar,
    pub gap: Scalar,
}

pub fn case_threshold(case: Case, cube: &TruncatedCube) -> Result<CaseThreshold, ThresholdError> {
    let lambda_lp = min_noise_case(case, cube)?.lambda;
    let (lambda_witness, _) = pauli_witness_bound(case, cube);
    let gap = &lambda_lp - &lambda_witness;
    Ok(CaseThreshold { case, r: cube.r().clone(), lambda_lp, lambda_witness, gap })
}

/// All four cases at every grid point, sorted by `(r, case)`. `jobs`
/// bounds the worker count; `None` uses the global pool.
pub fn sweep(grid: &[Scalar], jobs: Option<usize>) -> Result<Vec<CaseThreshold>, ThresholdError> {
    let cubes = grid.iter().map(|r| TruncatedCube::new(r.clone())).collect::<Result<Vec<_>, _>>()?;
    let work: Vec<(Case, &TruncatedCube)> =
        cubes.iter().flat_map(|c| Case::ALL.into_iter().map(move |k| (k, c))).collect();
    let run = || work.par_iter().map(|(k, c)| case_threshold(*k, c)).collect::<Result<Vec<_>, _>>();
    let mut rows = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ThresholdError::Pool(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    rows.sort_by(|a, b| a.r.cmp(&b.r).then(a.case.cmp(&b.case)));
    Ok(rows)
}

/// Inclusive decimal grid `start, start+step, …` up to `stop`.
pub fn grid(start: &Scalar, stop: &Scalar, step: &Scalar) -> Vec<Scalar> {
    assert!(step.is_positive(), "grid step must be positive");
    let mut out = Vec::new();
    let mut r = start.clone();
    while r <= *stop {
        out.push(r.clone());
        r += step;
    }
    out
}

pub const CSV_HEADER: &str =
    "r,r_exact,case,lambda_lp,lambda_lp_exact,lambda_witness,lambda_witness_exact,gap,gap_exact";

/// Plot-ready CSV: each quantity as a 12-digit decimal and an exact string.
pub fn sweep_csv(rows: &[CaseThreshold]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            to_decimal(&row.r, 12),
            row.r,
            row.case,
            to_decimal(&row.lambda_lp, 12),
            row.lambda_lp,
            to_decimal(&row.lambda_witness, 12),
            row.lambda_witness,
            to_decimal(&row.gap, 12),
            row.gap
        );
    }
    out
}

/// Bisects on the sign of the LP-versus-witness gap until the bracket is no
/// wider than `resolution`. One end of `[lo, hi]` must have a positive gap
/// and the other a zero gap.
pub fn breakdown_scan(
    case: Case,
    lo: &Scalar,
    hi: &Scalar,
    resolution: &Scalar,
) -> Result<(Scalar, Scalar), ThresholdError> {
    let gap_positive = |r: &Scalar| -> Result<bool, ThresholdError> {
        let cube = TruncatedCube::new(r.clone())?;
        Ok(case_threshold(case, &cube)?.gap.is_positive())
    };
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let fa = gap_positive(&a)?;
    let fb = gap_positive(&b)?;
    if fa == fb {
        return Err(ThresholdError::NoBreakpoint { case, lo: a, hi: b });
    }
    while &b - &a > *resolution {
        let mid = (&a + &b) / int(2);
        if gap_positive(&mid)? == fa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a, b))
}

/// Exact check of a certificate claimed for `case`.
pub fn verify_certificate(cert: &SeparableCertificate, case: Case) -> Result<(), CertificateError> {
    match &cert.target {
        CertificateTarget::Case(c) if *c == case => {}
        CertificateTarget::Case(c) => {
            return Err(CertificateError::WrongTarget { expected: case, found: format!("case {c}") })
        }
        CertificateTarget::Custom(_) => {
            return Err(CertificateError::WrongTarget { expected: case, found: "a custom input".into() })
        }
    }
    cert.check()
}

/// Products `(x_A,y_A,z_A) ⊗ (x_B,y_B,z_B)` with unit `|x|, |y|`, `|z| = r`,
/// and `x_A = −y_B`, `x_B = −y_A`. Sixteen members.
pub fn anticorrelated_family(r: &Scalar) -> Vec<(BlochVector, BlochVector)> {
    let pm = [int(1), int(-1)];
    let zs = [r.clone(), -r];
    let mut out = Vec::with_capacity(16);
    for xa in &pm {
        for ya in &pm {
            for za in &zs {
                for zb in &zs {
                    let a = BlochVector::new(xa.clone(), ya.clone(), za.clone());
                    let b = BlochVector::new(-ya, -xa, zb.clone());
                    out.push((a, b));
                }
            }
        }
    }
    out
}

/// Hand-built case 4 decomposition at `λ = 1 − 1/(2+r²)`: one product term
/// of weight `1/(2+r²)` plus the uniform anticorrelated family carrying
/// `(1+r²)/(2+r²)`. Valid for every `r ∈ (0, 1]`.
///
/// With rows indexing qubit A, the noisy output of case 4 is the transpose
/// of the commonly displayed table, so the single product term here is
/// `(r,1,1) ⊗ (1,r,1)`; the family is invariant under the exchange.
pub fn build_case4_certificate(r: &Scalar) -> Result<SeparableCertificate, ThresholdError> {
    TruncatedCube::new(r.clone())?;
    let one = Scalar::one();
    let denom = int(2) + r * r;
    let lambda = &one - &one / &denom;
    let single = &one / &denom;
    let family = anticorrelated_family(r);
    let each = (&one + r * r) / &denom / int(family.len() as i64);
    let (a, b) = Case::Four.inputs(r);
    let mut terms = vec![ProductTerm { p: single, a, b }];
    terms.extend(family.into_iter().map(|(a, b)| ProductTerm { p: each.clone(), a, b }));
    Ok(SeparableCertificate { r: r.clone(), lambda, target: CertificateTarget::Case(Case::Four), terms })
}

/// Regenerates a certificate for cases 1–3 by LP,
/// sparsification and exact reconstruction, and checks the achieved noise
/// level against the closed form.
pub fn regenerate_case_certificate(case: Case, r: &Scalar) -> Result<SeparableCertificate, ThresholdError> {
    if case == Case::Four {
        return Err(ThresholdError::NotRegenerable);
    }
    let (lo, hi) = regeneration_window();
    if *r < lo || *r > hi {
        return Err(ThresholdError::OutsideWindow { r: r.clone(), lo, hi });
    }
    let cube = TruncatedCube::new(r.clone())?;
    let optimum = min_noise_case(case, &cube)?;
    let formula = analytic_threshold(case, r);
    if optimum.lambda != formula {
        return Err(ThresholdError::FormulaViolation { case, r: r.clone(), lp: optimum.lambda, formula });
    }
    if optimum.solution.support().len() > 16 {
        return Err(ThresholdError::SupportTooLarge(optimum.solution.support().len()));
    }
    verify_certificate(&optimum.certificate, case)?;
    Ok(optimum.certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{apply_noisy_cz, product_operator};

    fn cube(r: &Scalar) -> TruncatedCube {
        TruncatedCube::new(r.clone()).unwrap()
    }

    #[test]
    fn case1_forms_agree() {
        for r in [ratio(1, 2), ratio(1, 3), ratio(2, 3), int(1), ratio(1, 7), ratio(9, 10)] {
            assert_eq!(case1_formula(&r), case1_formula_complement(&r));
        }
        assert_eq!(case1_formula(&ratio(1, 2)), ratio(272, 489));
        assert_eq!(analytic_threshold(Case::Four, &int(1)), ratio(2, 3));
    }

    #[test]
    fn witness_bounds_match_formulas() {
        for r in [ratio(9, 20), ratio(1, 2), ratio(4, 5), int(1)] {
            let c = cube(&r);
            for case in Case::ALL {
                assert_eq!(pauli_witness_bound(case, &c).0, witness_formula(case, &r), "case {case} r {r}");
            }
        }
    }

    #[test]
    fn case3_witness_switches_below_sqrt2_minus_1() {
        // For small r a second condition, 1 − 1/(2 − r²), dominates.
        for r in [ratio(1, 5), ratio(2, 5)] {
            let expected = Scalar::one() - Scalar::one() / (int(2) - &r * &r);
            assert_eq!(pauli_witness_bound(Case::Three, &cube(&r)).0, expected);
            assert!(expected > witness_formula(Case::Three, &r));
        }
        for case in [Case::One, Case::Two, Case::Four] {
            let r = ratio(1, 5);
            assert_eq!(pauli_witness_bound(case, &cube(&r)).0, witness_formula(case, &r));
        }
    }

    #[test]
    fn witness_report_has_48_conditions() {
        let (_, report) = pauli_witness_bound(Case::Four, &cube(&ratio(1, 2)));
        assert_eq!(report.entries.len(), 48);
        assert!(!report.binding().is_empty());
    }

    #[test]
    fn case4_binding_witness_is_down_down_on_a_y_b_x() {
        // Rows index qubit A, so the X/Y roles of the usual display swap.
        let (_, report) = pauli_witness_bound(Case::Four, &cube(&ratio(1, 3)));
        let binding = report.binding();
        assert!(binding
            .iter()
            .any(|e| e.p == "Y" && e.q == "X" && e.s == Some(Outcome::Minus) && e.t == Some(Outcome::Minus)));
    }

    #[test]
    fn facet_pair_bound_dominates_pauli_bound() {
        let c = cube(&ratio(1, 2));
        for case in Case::ALL {
            assert!(facet_pair_witness_bound(case, &c) >= pauli_witness_bound(case, &c).0);
        }
    }

    #[test]
    fn case4_output_is_transpose_of_display() {
        let r = ratio(1, 2);
        let lambda = ratio(5, 9);
        let out = apply_noisy_cz(&Case::Four.input_operator(&r), &lambda).unwrap();
        let d = int(2) + &r * &r;
        // Displayed table, scaled by 1/(2+r²).
        let rows = [
            [d.clone(), r.clone(), int(1), int(1)],
            [int(1), r.clone(), -(&r * &r), int(1)],
            [r.clone(), int(-1), r.clone(), r.clone()],
            [int(1), r.clone(), int(1), int(1)],
        ];
        let displayed = TwoQubitOperator::from_coeffs(rows.map(|row| row.map(|v| v / &d))).unwrap();
        assert_eq!(out.transpose(), displayed);
        assert_ne!(out, displayed);
    }

    #[test]
    fn case4_single_term_matches_display() {
        let r = ratio(1, 3);
        let a = BlochVector::new(int(1), r.clone(), int(1));
        let b = BlochVector::new(r.clone(), int(1), int(1));
        let op = product_operator(&a, &b);
        let r2 = &r * &r;
        let expected = [
            [int(1), r.clone(), int(1), int(1)],
            [int(1), r.clone(), int(1), int(1)],
            [r.clone(), r2, r.clone(), r.clone()],
            [int(1), r.clone(), int(1), int(1)],
        ];
        assert_eq!(op.coeffs(), &expected);
        // Our term is its swap.
        let (ca, cb) = Case::Four.inputs(&r);
        assert_eq!(product_operator(&ca, &cb), op.transpose());
    }

    #[test]
    fn anticorrelated_family_structure() {
        let r = ratio(1, 2);
        let fam = anticorrelated_family(&r);
        assert_eq!(fam.len(), 16);
        let c = cube(&r);
        let mut sum: [[Scalar; 4]; 4] = Default::default();
        for (a, b) in &fam {
            assert!(c.is_extremum(a) && c.is_extremum(b));
            let op = product_operator(a, b);
            for i in 0..4 {
                for j in 0..4 {
                    sum[i][j] += &op.coeffs()[i][j] / int(16);
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i, j) {
                    (0, 0) => int(1),
                    (1, 2) | (2, 1) => int(-1),
                    _ => int(0),
                };
                assert_eq!(sum[i][j], expected, "({i},{j})");
            }
        }
    }

    #[test]
    fn case4_certificate_valid() {
        for r in [ratio(1, 4), ratio(1, 2), ratio(3, 4), int(1)] {
            let cert = build_case4_certificate(&r).unwrap();
            verify_certificate(&cert, Case::Four).unwrap();
            assert_eq!(cert.lambda, witness_formula(Case::Four, &r));
        }
        assert_eq!(build_case4_certificate(&ratio(1, 2)).unwrap().lambda, ratio(5, 9));
    }

    #[test]
    fn corrupted_certificate_rejected() {
        let mut cert = build_case4_certificate(&ratio(1, 2)).unwrap();
        cert.terms[3].p = -cert.terms[3].p.clone();
        assert!(matches!(
            verify_certificate(&cert, Case::Four),
            Err(CertificateError::NonPositiveWeight { index: 3, .. })
        ));
        let cert = build_case4_certificate(&ratio(1, 2)).unwrap();
        assert!(matches!(verify_certificate(&cert, Case::One), Err(CertificateError::WrongTarget { .. })));
        let mut cert = build_case4_certificate(&ratio(1, 2)).unwrap();
        cert.lambda = ratio(1, 2);
        assert!(matches!(cert.check(), Err(CertificateError::Mismatch { .. })));
        let mut cert = build_case4_certificate(&ratio(1, 2)).unwrap();
        cert.terms[0].a = BlochVector::origin();
        assert!(matches!(cert.check(), Err(CertificateError::NotExtremal { index: 0, .. })));
    }

    #[test]
    fn regeneration_guards() {
        assert!(matches!(
            regenerate_case_certificate(Case::Four, &ratio(1, 2)),
            Err(ThresholdError::NotRegenerable)
        ));
        assert!(matches!(
            regenerate_case_certificate(Case::One, &ratio(1, 10)),
            Err(ThresholdError::OutsideWindow { .. })
        ));
    }

    #[test]
    fn grid_and_csv() {
        let g = grid(&ratio(3, 10), &int(1), &ratio(1, 20));
        assert_eq!(g.len(), 15);
        assert_eq!(g.last(), Some(&int(1)));
        let row = CaseThreshold {
            case: Case::One,
            r: ratio(1, 2),
            lambda_lp: ratio(272, 489),
            lambda_witness: ratio(1, 2),
            gap: ratio(55, 978),
        };
        let csv = sweep_csv(&[row]);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "0.500000000000,1/2,1,0.556237218814,272/489,0.500000000000,1/2,0.056237218814,55/978"
        );
    }
}

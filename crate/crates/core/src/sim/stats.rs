//! Goodness-of-fit helpers for comparing sampled frequencies with exact
//! probabilities.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Outcomes with smaller exact probability are treated as impossible.
const IMPOSSIBLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Pearson's test of `counts` against `probabilities` over `shots` draws.
/// Any count on an impossible outcome gives `p = 0`.
pub fn chi_square(counts: &BTreeMap<String, u64>, probabilities: &BTreeMap<String, f64>, shots: u64) -> ChiSquare {
    let n = shots as f64;
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (outcome, &p) in probabilities {
        let observed = counts.get(outcome).copied().unwrap_or(0) as f64;
        if p < IMPOSSIBLE {
            if observed > 0.0 {
                return ChiSquare { statistic: f64::INFINITY, dof: 0, p_value: 0.0 };
            }
            continue;
        }
        let expected = n * p;
        statistic += (observed - expected).powi(2) / expected;
        bins += 1;
    }
    if counts.keys().any(|k| !probabilities.contains_key(k)) {
        return ChiSquare { statistic: f64::INFINITY, dof: 0, p_value: 0.0 };
    }
    let dof = bins.saturating_sub(1);
    let p_value =
        if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(statistic) };
    ChiSquare { statistic, dof, p_value }
}

/// `(f − p) / sqrt(p(1−p)/N)` per outcome; zero-variance outcomes give 0
/// when matched exactly and infinity otherwise.
pub fn z_scores(
    counts: &BTreeMap<String, u64>,
    probabilities: &BTreeMap<String, f64>,
    shots: u64,
) -> BTreeMap<String, f64> {
    let n = shots as f64;
    probabilities
        .iter()
        .map(|(outcome, &p)| {
            let f = counts.get(outcome).copied().unwrap_or(0) as f64 / n;
            let var = p * (1.0 - p) / n;
            let z = if var > 0.0 {
                (f - p) / var.sqrt()
            } else if (f - p).abs() < IMPOSSIBLE {
                0.0
            } else {
                f64::INFINITY
            };
            (outcome.clone(), z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map<T: Copy>(items: &[(&str, T)]) -> BTreeMap<String, T> {
        items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn perfect_fit() {
        let probs = map(&[("+", 0.5), ("-", 0.5)]);
        let r = chi_square(&map(&[("+", 500), ("-", 500)]), &probs, 1000);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 1);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn known_statistic() {
        // (60-50)²/50 + (40-50)²/50 = 4, one degree of freedom: p ≈ 0.0455.
        let r = chi_square(&map(&[("+", 60), ("-", 40)]), &map(&[("+", 0.5), ("-", 0.5)]), 100);
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert!((r.p_value - 0.0455003).abs() < 1e-6);
        assert!(r.passes(0.001) && !r.passes(0.05));
    }

    #[test]
    fn impossible_outcomes() {
        let probs = map(&[("+", 1.0), ("-", 0.0)]);
        assert_eq!(chi_square(&map(&[("+", 10)]), &probs, 10).p_value, 1.0);
        assert_eq!(chi_square(&map(&[("+", 9), ("-", 1)]), &probs, 10).p_value, 0.0);
        let z = z_scores(&map(&[("+", 10)]), &probs, 10);
        assert_eq!(z["+"], 0.0);
        assert_eq!(z["-"], 0.0);
    }

    #[test]
    fn z_score_value() {
        let z = z_scores(&map(&[("+", 60), ("-", 40)]), &map(&[("+", 0.5), ("-", 0.5)]), 100);
        assert!((z["+"] - 2.0).abs() < 1e-12);
        assert!((z["-"] + 2.0).abs() < 1e-12);
    }
}

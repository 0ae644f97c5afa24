//! Dense two-phase primal simplex over exact rationals.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0`. Phase one minimises the sum of
//! artificial variables; phase two optimises the real objective from the
//! resulting basis. Pivoting takes the most negative reduced cost and falls
//! back to Bland's rule during degenerate stalls, so the method terminates on
//! the heavily degenerate separability programs.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::linalg::{self, LinAlgError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase-one residual {residual})")]
    Infeasible { residual: Scalar, farkas: Vec<Scalar> },
    #[error("linear program is unbounded along column {column}")]
    Unbounded { column: usize },
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("certificate reconstruction failed: {0}")]
    Reconstruction(#[from] LinAlgError),
    #[error("reconstructed weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: Scalar },
}

/// `min objective · x` subject to `constraints · x = rhs`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Scalar>,
    /// Row-major, `rhs.len()` rows of `objective.len()` entries.
    pub constraints: Vec<Vec<Scalar>>,
    pub rhs: Vec<Scalar>,
}

impl LinearProgram {
    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_columns(&self) -> usize {
        self.objective.len()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        self.constraints.iter().map(|row| row[j].clone()).collect()
    }

    /// Sub-program over the listed columns; column `k` of the result is
    /// column `columns[k]` of `self`.
    pub fn restrict(&self, columns: &[usize]) -> LinearProgram {
        LinearProgram {
            objective: columns.iter().map(|&j| self.objective[j].clone()).collect(),
            constraints: self.constraints.iter().map(|row| columns.iter().map(|&j| row[j].clone()).collect()).collect(),
            rhs: self.rhs.clone(),
        }
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.constraints.len() != self.rhs.len() {
            return Err(LpError::Malformed(format!(
                "{} constraint rows but {} right-hand sides",
                self.constraints.len(),
                self.rhs.len()
            )));
        }
        if let Some(bad) = self.constraints.iter().position(|r| r.len() != self.objective.len()) {
            return Err(LpError::Malformed(format!("row {bad} has the wrong width")));
        }
        Ok(())
    }

    /// Residual-free check of `A x = b` and `x ≥ 0` for a sparse solution.
    pub fn is_feasible_point(&self, weights: &BTreeMap<usize, Scalar>) -> bool {
        if weights.values().any(Signed::is_negative) {
            return false;
        }
        self.constraints.iter().zip(&self.rhs).all(|(row, b)| {
            let lhs: Scalar = weights.iter().map(|(&j, w)| &row[j] * w).sum();
            lhs == *b
        })
    }
}

/// Optimal basic solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSolution {
    pub objective: Scalar,
    /// Strictly positive entries of `x`.
    pub weights: BTreeMap<usize, Scalar>,
    /// Structural columns in the final basis (may include zero-valued ones).
    pub basis: Vec<usize>,
}

impl BasicSolution {
    pub fn value(&self, column: usize) -> Scalar {
        self.weights.get(&column).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }
}

struct Tableau {
    /// `m` rows of `n + m + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<Scalar>>,
    /// Reduced costs with the negated objective value in the last slot.
    costs: Vec<Scalar>,
    basis: Vec<usize>,
    n: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.rows.first().map_or(self.n + 1, Vec::len)
    }

    fn rhs(&self, i: usize) -> &Scalar {
        self.rows[i].last().expect("tableau rows are non-empty")
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let mut prow = std::mem::take(&mut self.rows[p]);
        let piv = prow[q].clone();
        let nonzero: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
        for &k in &nonzero {
            prow[k] /= &piv;
        }
        let eliminate = |row: &mut Vec<Scalar>| {
            if row[q].is_zero() {
                return;
            }
            let f = row[q].clone();
            for &k in &nonzero {
                row[k] -= &f * &prow[k];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p {
                eliminate(row);
            }
        }
        eliminate(&mut self.costs);
        self.rows[p] = prow;
        self.basis[p] = q;
    }

    fn set_costs(&mut self, c: &[Scalar]) {
        let w = self.width();
        let mut costs = vec![Scalar::zero(); w];
        costs[..c.len()].clone_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c.get(b).cloned().unwrap_or_else(Scalar::zero);
            if cb.is_zero() {
                continue;
            }
            for (k, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    costs[k] -= &cb * v;
                }
            }
        }
        self.costs = costs;
    }

    /// Pivots over columns `< limit` until optimal. The entering column has
    /// the most negative reduced cost; after a run of degenerate pivots the
    /// rule drops to Bland's smallest index until the objective moves again,
    /// which rules out cycling.
    fn optimise(&mut self, limit: usize) -> Result<(), LpError> {
        let mut degenerate_run = 0usize;
        loop {
            let entering = if degenerate_run >= DEGENERATE_LIMIT {
                (0..limit).find(|&j| self.costs[j].is_negative())
            } else {
                (0..limit)
                    .filter(|&j| self.costs[j].is_negative())
                    .min_by(|&a, &b| self.costs[a].cmp(&self.costs[b]).then(a.cmp(&b)))
            };
            let Some(q) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((p, step)) = best else {
                return Err(LpError::Unbounded { column: q });
            };
            if step.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(p, q);
        }
    }
}

const DEGENERATE_LIMIT: usize = 50;

/// Solves the program to an exact optimal basic solution.
pub fn simplex_solve(lp: &LinearProgram) -> Result<BasicSolution, LpError> {
    lp.validate()?;
    let m = lp.num_rows();
    let n = lp.num_columns();

    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, (row, b)) in lp.constraints.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        signs.push(flip);
        let mut t: Vec<Scalar> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        t.extend((0..m).map(|k| if k == i { Scalar::from_integer(1.into()) } else { Scalar::zero() }));
        t.push(if flip { -b } else { b.clone() });
        rows.push(t);
    }
    let mut tab = Tableau { rows, costs: Vec::new(), basis: (n..n + m).collect(), n };

    // Phase one: minimise the artificial sum.
    let mut phase_one = vec![Scalar::zero(); n];
    phase_one.extend((0..m).map(|_| Scalar::from_integer(1.into())));
    tab.set_costs(&phase_one);
    tab.optimise(n + m)?;
    let residual = -tab.costs.last().cloned().unwrap_or_else(Scalar::zero);
    if residual.is_positive() {
        let one = Scalar::from_integer(1.into());
        let farkas = (0..m)
            .map(|i| {
                let y = &one - &tab.costs[n + i];
                if signs[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        return Err(LpError::Infeasible { residual, farkas });
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(q) = (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, q);
            }
        }
    }

    tab.set_costs(&lp.objective);
    tab.optimise(n)?;

    let mut weights = BTreeMap::new();
    let mut basis = Vec::new();
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            basis.push(b);
            let v = tab.rhs(i).clone();
            if v.is_positive() {
                weights.insert(b, v);
            }
        }
    }
    basis.sort_unstable();
    let objective = weights.iter().map(|(&j, w)| &lp.objective[j] * w).sum();
    Ok(BasicSolution { objective, weights, basis })
}

/// Recomputes reduced costs `c_j − yᵀA_j` from the basis alone, with `y`
/// solving `B_ᵀ y = c_B`. Independent of the tableau that produced the basis.
pub fn reduced_costs(lp: &LinearProgram, basis: &[usize]) -> Result<Vec<Scalar>, LpError> {
    let m = lp.num_rows();
    let bt_rows: Vec<Vec<Scalar>> = basis.iter().map(|&j| lp.column(j)).collect();
    let cb: Vec<Scalar> = basis.iter().map(|&j| lp.objective[j].clone()).collect();
    let y = if basis.is_empty() { vec![Scalar::zero(); m] } else { linalg::solve(&bt_rows, &cb)? };
    Ok((0..lp.num_columns())
        .map(|j| {
            let ya: Scalar = lp.constraints.iter().zip(&y).map(|(row, yi)| &row[j] * yi).sum();
            &lp.objective[j] - ya
        })
        .collect())
}

/// Exact optimality check: primal feasibility, support inside the basis,
/// and nonnegative reduced costs.
pub fn is_certified_optimal(lp: &LinearProgram, sol: &BasicSolution) -> bool {
    if !lp.is_feasible_point(&sol.weights) {
        return false;
    }
    if sol.weights.keys().any(|j| !sol.basis.contains(j)) {
        return false;
    }
    match reduced_costs(lp, &sol.basis) {
        Ok(d) => d.iter().all(|v| !v.is_negative()),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn lp(objective: &[i64], rows: &[&[i64]], rhs: &[i64]) -> LinearProgram {
        LinearProgram {
            objective: objective.iter().map(|&v| int(v)).collect(),
            constraints: rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            rhs: rhs.iter().map(|&v| int(v)).collect(),
        }
    }

    #[test]
    fn single_variable() {
        let p = lp(&[1], &[&[1]], &[1]);
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.objective, int(1));
        assert!(is_certified_optimal(&p, &sol));
    }

    #[test]
    fn small_transport_like_program() {
        // min x0 + 2x1 + 3x2 s.t. x0 + x1 + x2 = 4, x1 - x2 = 1
        let p = lp(&[1, 2, 3], &[&[1, 1, 1], &[0, 1, -1]], &[4, 1]);
        let sol = simplex_solve(&p).unwrap();
        // x2 = 0, x1 = 1, x0 = 3 → 5
        assert_eq!(sol.objective, int(5));
        assert_eq!(sol.value(0), int(3));
        assert_eq!(sol.value(1), int(1));
        assert!(is_certified_optimal(&p, &sol));
    }

    #[test]
    fn fractional_optimum() {
        // min -x0 - x1 s.t. 2x0 + x1 + s0 = 4, x0 + 3x1 + s1 = 6
        let p = lp(&[-1, -1, 0, 0], &[&[2, 1, 1, 0], &[1, 3, 0, 1]], &[4, 6]);
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.objective, ratio(-14, 5));
        assert_eq!(sol.value(0), ratio(6, 5));
        assert_eq!(sol.value(1), ratio(8, 5));
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        let p = lp(&[1, 1], &[&[-1, -1]], &[-3]);
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.objective, int(3));
    }

    #[test]
    fn infeasible_with_farkas_row() {
        // x0 + x1 = 1 and x0 + x1 = 2
        let p = lp(&[0, 0], &[&[1, 1], &[1, 1]], &[1, 2]);
        match simplex_solve(&p) {
            Err(LpError::Infeasible { residual, farkas }) => {
                assert!(residual.is_positive());
                // yᵀA ≤ 0 and yᵀb > 0.
                for j in 0..2 {
                    let ya: Scalar = p.constraints.iter().zip(&farkas).map(|(r, y)| &r[j] * y).sum();
                    assert!(!ya.is_positive());
                }
                let yb: Scalar = p.rhs.iter().zip(&farkas).map(|(b, y)| b * y).sum();
                assert!(yb.is_positive());
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_negative_requirement() {
        let p = lp(&[0], &[&[1]], &[-1]);
        assert!(matches!(simplex_solve(&p), Err(LpError::Infeasible { .. })));
    }

    #[test]
    fn unbounded_direction() {
        // min -x0 s.t. x0 - x1 = 0
        let p = lp(&[-1, 0], &[&[1, -1]], &[0]);
        assert!(matches!(simplex_solve(&p), Err(LpError::Unbounded { .. })));
    }

    #[test]
    fn redundant_rows_and_duplicate_columns() {
        let p = lp(&[1, 1, 0], &[&[1, 1, 1], &[2, 2, 2]], &[1, 2]);
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.objective, int(0));
        assert_eq!(sol.value(2), int(1));
        assert!(is_certified_optimal(&p, &sol));
    }

    #[test]
    fn malformed_shapes_rejected() {
        let mut p = lp(&[1, 1], &[&[1, 1]], &[1]);
        p.rhs.push(int(0));
        assert!(matches!(simplex_solve(&p), Err(LpError::Malformed(_))));
    }
}

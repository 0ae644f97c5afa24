//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("columns are linearly dependent (rank {rank} < {columns})")]
    Singular { rank: usize, columns: usize },
}

/// Reduced row echelon form in place; returns the pivot column of each pivot row.
fn rref(rows: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let pivot = rows[next][col].clone();
        for v in rows[next].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        let pivot_row = std::mem::take(&mut rows[next]);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row.is_empty() || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (k, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    row[k] -= &factor * p;
                }
            }
        }
        rows[next] = pivot_row;
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank of a matrix given as rows.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut work = rows.to_vec();
    rref(&mut work, ncols).len()
}

/// Rank of a set of column vectors.
pub fn column_rank(columns: &[Vec<Scalar>]) -> usize {
    // Row rank of the transpose equals column rank.
    rank(columns)
}

/// One solution of `A x = b` (free variables set to zero).
pub fn solve(a_rows: &[Vec<Scalar>], b: &[Scalar]) -> Result<Vec<Scalar>, LinAlgError> {
    assert_eq!(a_rows.len(), b.len(), "row count mismatch");
    let ncols = a_rows.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Scalar>> = a_rows
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return Err(LinAlgError::Inconsistent);
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = aug[row][ncols].clone();
    }
    Ok(x)
}

/// Solves `Σ_k w_k · columns[k] = target`, requiring a unique solution.
pub fn solve_columns(columns: &[Vec<Scalar>], target: &[Scalar]) -> Result<Vec<Scalar>, LinAlgError> {
    let m = target.len();
    let k = columns.len();
    let r = column_rank(columns);
    if r < k {
        return Err(LinAlgError::Singular { rank: r, columns: k });
    }
    let rows: Vec<Vec<Scalar>> = (0..m).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    solve(&rows, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank(&m(&[&[1, 0], &[0, 1]])), 2);
    }

    #[test]
    fn solves_square_system() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &[int(1), int(3)]), Err(LinAlgError::Inconsistent));
    }

    #[test]
    fn overdetermined_consistent() {
        let cols = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        let w = solve_columns(&cols, &[int(2), int(3), int(5)]).unwrap();
        assert_eq!(w, vec![int(2), int(3)]);
        let dependent = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(matches!(solve_columns(&dependent, &[int(1), int(1)]), Err(LinAlgError::Singular { .. })));
    }
}

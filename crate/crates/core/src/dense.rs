//! Small dense complex matrices in `f64`.
//!
//! Only used as an independent oracle: the CZ conjugation table is derived
//! from it, and the circuit simulator is validated against a density-matrix
//! evolution built on it. Nothing exact depends on these floats.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (k, e) in entries.iter().enumerate() {
            m[(k, k)] = *e;
        }
        m
    }

    /// σ_0..σ_3 = I, X, Y, Z.
    pub fn pauli(index: usize) -> Self {
        match index {
            0 => Self::identity(2),
            1 => Self::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            2 => Self::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            3 => Self::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
            _ => panic!("Pauli index {index} out of range"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut out = Self::zeros(dim);
        for (a, b) in itertools_product(self.dim, self.dim) {
            let s = self[(a, b)];
            if s == ZERO {
                continue;
            }
            for (c, d) in itertools_product(other.dim, other.dim) {
                out[(a * other.dim + c, b * other.dim + d)] = s * other[(c, d)];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for (r, c) in itertools_product(self.dim, self.dim) {
            out[(c, r)] = self[(r, c)].conj();
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, unitary: &Self) -> Self {
        &(unitary * self) * &unitary.adjoint()
    }

    /// Real part of `tr(self · other)`.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (r, c) in itertools_product(self.dim, self.dim) {
            acc += (self[(r, c)] * other[(c, r)]).re;
        }
        acc
    }
}

fn itertools_product(a: usize, b: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..a).flat_map(move |i| (0..b).map(move |j| (i, j)))
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ Z`; the first tensor factor is qubit A.
pub fn cz_matrix() -> CMatrix {
    CMatrix::diagonal(&[ONE, ONE, ONE, -ONE])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_relations() {
        let x = CMatrix::pauli(1);
        let y = CMatrix::pauli(2);
        let z = CMatrix::pauli(3);
        // XY = iZ
        assert!((&x * &y).max_abs_diff(&z.scale(I)) < 1e-15);
        assert!((&x * &x).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn kron_dims_and_trace() {
        let zz = CMatrix::pauli(3).kron(&CMatrix::pauli(3));
        assert_eq!(zz.dim(), 4);
        assert_eq!(zz.trace(), ZERO);
        assert_eq!(zz[(3, 3)], ONE);
        assert_eq!(zz[(1, 1)], -ONE);
    }

    #[test]
    fn cz_is_self_inverse() {
        let cz = cz_matrix();
        assert!((&cz * &cz).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }
}

//! Small dense complex matrices: gate unitaries and reference products.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

/// Square, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Matrix {
        let mut out = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// Kronecker product with `self` on the more significant index bits.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let dim = self.dim * other.dim;
        let mut out = Matrix::zeros(dim);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self[(r1, c1)];
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        out[(r1 * other.dim + r2, c1 * other.dim + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest elementwise deviation `max |self - other|`.
    pub fn max_deviation(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.max_deviation(other) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self * &self.adjoint()).approx_eq(&Matrix::identity(self.dim), tol)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_places_left_operand_on_high_bits() {
        let x = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let i = Matrix::identity(2);
        let ix = i.kron(&x);
        // I ⊗ X is block diagonal with X blocks.
        assert_eq!(ix[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(ix[(2, 3)], Complex64::new(1.0, 0.0));
        assert_eq!(ix[(0, 2)], Complex64::new(0.0, 0.0));
        let xi = x.kron(&i);
        assert_eq!(xi[(0, 2)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn product_and_adjoint() {
        let a = Matrix::from_rows(vec![
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(-1.0, 0.5)],
        ]);
        let p = &a * &Matrix::identity(2);
        assert_eq!(p, a);
        assert_eq!(a.adjoint()[(0, 1)], Complex64::new(3.0, 0.0));
        assert_eq!(a.adjoint()[(1, 0)], Complex64::new(0.0, -2.0));
    }
}

//! Partial-pivoting LU factorization for complex matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Packed L\U factors of a row permutation of a square matrix.
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Factors `PA = LU` with row pivoting on the largest column entry.
    ///
    /// An exactly zero pivot column reports `Singular`; near-singular inputs
    /// factor successfully and are caught by residual checks downstream.
    pub fn factor(m: &ComplexMatrix) -> Result<Self> {
        let n = m.require_square()?;
        let mut lu = m.entries().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 0.0) {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                if f != Complex64::ZERO {
                    for j in k + 1..n {
                        let t = f * lu[k * n + j];
                        lu[i * n + j] -= t;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    /// Solves `Ax = b` for one right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(b.len(), self.n, "right-hand side length must match");
        let n = self.n;
        let mut x: Vec<Complex64> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    /// Computes `A^-1` column by column.
    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n, n);
        let mut e = vec![Complex64::ZERO; n];
        for j in 0..n {
            e[j] = Complex64::ONE;
            let col = self.solve_vec(&e);
            e[j] = Complex64::ZERO;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_known_system() {
        // A = [[2, 1], [1, 3]], b = (5, 10) -> x = (1, 3)
        let a = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        let f = LuFactors::factor(&a).unwrap();
        let x = f.solve_vec(&[c(5.0, 0.0), c(10.0, 0.0)]);
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((x[1] - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = ComplexMatrix::new(
            3,
            3,
            vec![
                c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0),
                c(0.0, 0.0), c(3.0, 0.0), c(1.0, 1.0),
                c(-1.0, 0.0), c(0.5, 0.0), c(1.0, -2.0),
            ],
        )
        .unwrap();
        let inv = LuFactors::factor(&a).unwrap().inverse();
        let resid = a.mul(&inv).sub(&ComplexMatrix::identity(3));
        assert!(resid.max_abs() < 1e-14);
    }

    #[test]
    fn zero_pivot_column_reports_singular() {
        let a = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(LuFactors::factor(&a).err(), Some(Error::Singular)));
    }
}

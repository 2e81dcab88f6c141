//! Cyclic Jacobi diagonalization of Hermitian matrices and the singular
//! values derived from it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a Hermitian matrix, descending.
///
/// The input is symmetrized as `(H + H*)/2` first, so tiny rounding
/// asymmetry in a computed Gram matrix is harmless.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = h.require_square()?;
    h.require_finite()?;
    let mut a = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
        }
    }

    let scale = frobenius(&a);
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // Off-diagonal mass this small perturbs eigenvalues below the 1e-12
    // relative accuracy the oracles promise.
    let target = 1e-15 * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_frobenius(&a, n) <= target {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
            eig.sort_unstable_by(|x, y| y.total_cmp(x));
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }
    Err(Error::NoConvergence { iterations: MAX_SWEEPS })
}

/// Singular values of a rectangular matrix, descending, via the Hermitian
/// eigenproblem of the smaller Gram matrix.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.require_finite()?;
    let gram = if m.rows() >= m.cols() {
        m.adjoint().mul(m)
    } else {
        m.mul(&m.adjoint())
    };
    let eig = hermitian_eigenvalues(&gram)?;
    Ok(eig.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}

fn frobenius(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_frobenius(a: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One unitary plane rotation annihilating the (p, q) entry.
///
/// The complex entry is first rotated onto the real axis by a diagonal phase,
/// then the classical symmetric Jacobi angle is applied; both are folded into
/// a single unitary G with G[p][p] = c, G[p][q] = s, G[q][p] = -d s,
/// G[q][q] = d c, where d is the phase of conj(A[p][q]).
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let beta = a[p * n + q];
    let babs = beta.norm();
    if babs == 0.0 {
        return;
    }
    let d = beta.conj() / babs;
    let alpha = a[p * n + p].re;
    let gamma = a[q * n + q].re;
    let tau = (gamma - alpha) / (2.0 * babs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Columns: A <- A G.
    for k in 0..n {
        let ap = a[k * n + p];
        let aq = a[k * n + q];
        a[k * n + p] = ap * c - aq * (d * s);
        a[k * n + q] = ap * s + aq * (d * c);
    }
    // Rows: A <- G* A.
    let dbar = d.conj();
    for k in 0..n {
        let rp = a[p * n + k];
        let rq = a[q * n + k];
        a[p * n + k] = rp * c - rq * (dbar * s);
        a[q * n + k] = rp * s + rq * (dbar * c);
    }
    // The pivot pair is now diagonal by construction; pin it to kill residue.
    a[p * n + q] = Complex64::ZERO;
    a[q * n + p] = Complex64::ZERO;
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_returns_sorted_diagonal() {
        let h = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(4.0, 0.0), c(-2.0, 0.0)]);
        let eig = hermitian_eigenvalues(&h).unwrap();
        assert_eq!(eig, vec![4.0, 1.0, -2.0]);
    }

    #[test]
    fn pauli_like_hermitian_has_known_eigenvalues() {
        // [[0, -i], [i, 0]] has eigenvalues +-1.
        let h = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let eig = hermitian_eigenvalues(&h).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-14);
        assert!((eig[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        // Fixed Hermitian 4x4 built as B + B* from an arbitrary seed matrix.
        let b = ComplexMatrix::new(
            4,
            4,
            (0..16)
                .map(|k| c((k as f64 * 0.37).sin(), (k as f64 * 0.61).cos()))
                .collect(),
        )
        .unwrap();
        let h = b.add(&b.adjoint());
        let eig = hermitian_eigenvalues(&h).unwrap();
        let sum: f64 = eig.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_row_vector() {
        let m = ComplexMatrix::new(1, 3, vec![c(3.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)]).unwrap();
        let sv = singular_values(&m).unwrap();
        assert_eq!(sv.len(), 1);
        assert!((sv[0] - 5.0).abs() < 1e-13);
    }
}

//! Dense eigenvalues via Hessenberg reduction and shifted QR iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Hard cap on the dense eigensolver dimension.
pub const MAX_EIGEN_DIM: usize = 256;

/// Relative subdiagonal threshold below which a coupling is deflated to zero.
const DEFLATION_TOL: f64 = 1e-13;

/// How many stalled QR steps before an exceptional shift is injected.
const EXCEPTIONAL_EVERY: usize = 10;

/// Eigenvalues of a square matrix, with multiplicity.
///
/// Sorted by modulus descending, ties by argument ascending, so identical
/// inputs always serialize identically.
pub fn eigenvalues_dense(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.require_square()?;
    m.require_finite()?;
    if n > MAX_EIGEN_DIM {
        return Err(Error::DimensionCap { dim: n, max: MAX_EIGEN_DIM });
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }

    let mut h = m.entries().to_vec();
    hessenberg(&mut h, n);

    let mut eig = Vec::with_capacity(n);
    let cap = 100 * n;
    let mut steps = 0usize;
    let mut stall = 0usize;
    let mut hi = n - 1;

    loop {
        // Deflate negligible subdiagonals in the active part.
        for i in 0..hi {
            let scale = h[i * n + i].norm() + h[(i + 1) * n + i + 1].norm();
            if h[(i + 1) * n + i].norm() <= DEFLATION_TOL * scale {
                h[(i + 1) * n + i] = Complex64::ZERO;
            }
        }

        if hi == 0 {
            eig.push(h[0]);
            break;
        }

        // Lowest row of the trailing irreducible block.
        let mut lo = hi;
        while lo > 0 && h[lo * n + lo - 1] != Complex64::ZERO {
            lo -= 1;
        }

        if lo == hi {
            eig.push(h[hi * n + hi]);
            hi -= 1;
            stall = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eigenvalues_2x2(
                h[lo * n + lo],
                h[lo * n + hi],
                h[hi * n + lo],
                h[hi * n + hi],
            );
            eig.push(l1);
            eig.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            stall = 0;
            continue;
        }

        if steps >= cap {
            return Err(Error::NoConvergence { iterations: steps });
        }
        let shift = if stall > 0 && stall % EXCEPTIONAL_EVERY == 0 {
            // Ad-hoc real shift from the subdiagonal magnitudes; breaks the
            // cycling that symmetric spectra can induce.
            let ts = h[hi * n + hi - 1].norm() + h[(hi - 1) * n + hi - 2].norm();
            h[hi * n + hi] + Complex64::new(ts, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                h[hi * n + hi],
            )
        };
        qr_step(&mut h, n, lo, hi, shift);
        steps += 1;
        stall += 1;
    }

    eig.sort_unstable_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(eig)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(h: &mut [Complex64], n: usize) {
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| h[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let phase = if x0 == Complex64::ZERO { Complex64::ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm;

        // v = x - alpha e1, reflector H = I - tau v v* with real tau.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm_sqr;

        // Left application to rows k+1..n over columns k..n.
        for j in k..n {
            let mut w = Complex64::ZERO;
            for (t, vi) in v.iter().enumerate() {
                w += vi.conj() * h[(k + 1 + t) * n + j];
            }
            w *= tau;
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t) * n + j] -= w * vi;
            }
        }
        // Right application to columns k+1..n over all rows.
        for i in 0..n {
            let mut w = Complex64::ZERO;
            for (t, vi) in v.iter().enumerate() {
                w += h[i * n + k + 1 + t] * vi;
            }
            w *= tau;
            for (t, vi) in v.iter().enumerate() {
                h[i * n + k + 1 + t] -= w * vi.conj();
            }
        }

        h[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            h[i * n + k] = Complex64::ZERO;
        }
    }
}

/// One explicit single-shift QR step on the window [lo, hi].
fn qr_step(h: &mut [Complex64], n: usize, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[i * n + i] -= shift;
    }

    // QR by Givens rotations chasing the subdiagonal.
    let mut rots = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let a = h[i * n + i];
        let b = h[(i + 1) * n + i];
        let (c, s) = givens(a, b);
        for j in i..=hi {
            let top = h[i * n + j];
            let bot = h[(i + 1) * n + j];
            h[i * n + j] = top * c + bot * s;
            h[(i + 1) * n + j] = -s.conj() * top + bot * c;
        }
        h[(i + 1) * n + i] = Complex64::ZERO;
        rots.push((c, s));
    }

    // RQ: apply the adjoints on columns, in the same order.
    for (i, &(c, s)) in rots.iter().enumerate() {
        let i = lo + i;
        let kmax = (i + 1).min(hi);
        for k in lo..=kmax {
            let left = h[k * n + i];
            let right = h[k * n + i + 1];
            h[k * n + i] = left * c + right * s.conj();
            h[k * n + i + 1] = -s * left + right * c;
        }
    }

    for i in lo..=hi {
        h[i * n + i] += shift;
    }
}

/// Complex Givens pair (c real, s complex) with G (a, b)^T = (r, 0)^T.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalues of [[a, b], [c, d]] with a Vieta-stabilized small root.
fn eigenvalues_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mid = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (mid * mid - det).sqrt();
    let l1 = if (mid + disc).norm() >= (mid - disc).norm() { mid + disc } else { mid - disc };
    if l1 == Complex64::ZERO {
        (l1, l1)
    } else {
        (l1, det / l1)
    }
}

/// Trailing-block eigenvalue nearer the corner entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (l1, l2) = eigenvalues_2x2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::jacobi::hermitian_eigenvalues;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_match(mut got: Vec<Complex64>, mut want: Vec<Complex64>, tol: f64) {
        let key = |z: &Complex64| (z.re, z.im);
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < tol, "eigenvalue {g} differs from {w}");
        }
    }

    #[test]
    fn diagonal_case() {
        let m = ComplexMatrix::diagonal(&[c(0.3, 0.0), c(0.0, 0.7)]);
        let eig = eigenvalues_dense(&m).unwrap();
        sorted_match(eig, vec![c(0.3, 0.0), c(0.0, 0.7)], 1e-14);
    }

    #[test]
    fn triangular_diagonal_is_recovered() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(5.0, 1.0), c(-2.0, 0.5), c(0.0, 0.0),
                c(3.0, 0.0), c(7.0, -2.0), c(0.5, -0.5),
            ],
        )
        .unwrap();
        let eig = eigenvalues_dense(&m).unwrap();
        sorted_match(eig, vec![c(1.0, 0.0), c(-2.0, 0.5), c(0.5, -0.5)], 1e-10);
    }

    #[test]
    fn companion_of_quadratic_z2_minus_1() {
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let eig = eigenvalues_dense(&m).unwrap();
        sorted_match(eig, vec![c(1.0, 0.0), c(-1.0, 0.0)], 1e-12);
    }

    #[test]
    fn companion_of_quartic_with_known_roots() {
        // p(z) = (z-1)(z+2)(z-3i)(z+0.5) expanded; companion in bottom-row form.
        let roots = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0), c(-0.5, 0.0)];
        // Coefficients of prod (z - r): z^4 + c3 z^3 + c2 z^2 + c1 z + c0.
        let mut coef = vec![Complex64::ONE];
        for r in roots {
            let mut next = vec![Complex64::ZERO; coef.len() + 1];
            for (k, &a) in coef.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a * r;
            }
            coef = next;
        }
        let n = 4;
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = Complex64::ONE;
        }
        for j in 0..n {
            m[(n - 1, j)] = -coef[n - j];
        }
        let eig = eigenvalues_dense(&m).unwrap();
        sorted_match(eig, roots.to_vec(), 1e-10);
    }

    #[test]
    fn hermitian_input_agrees_with_jacobi_oracle() {
        let b = ComplexMatrix::new(
            5,
            5,
            (0..25)
                .map(|k| c((k as f64 * 0.731).sin(), (k as f64 * 0.379).cos()))
                .collect(),
        )
        .unwrap();
        let h = b.add(&b.adjoint());
        let qr: Vec<f64> = {
            let mut v: Vec<f64> = eigenvalues_dense(&h).unwrap().iter().map(|z| z.re).collect();
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            v
        };
        let jac = hermitian_eigenvalues(&h).unwrap();
        for (a, b) in qr.iter().zip(&jac) {
            assert!((a - b).abs() < 1e-10, "QR {a} vs Jacobi {b}");
        }
    }

    #[test]
    fn trace_and_determinant_consistency() {
        let m = ComplexMatrix::new(
            6,
            6,
            (0..36)
                .map(|k| c((k as f64 * 1.17).sin() * 0.8, (k as f64 * 0.533).cos() * 0.8))
                .collect(),
        )
        .unwrap();
        let eig = eigenvalues_dense(&m).unwrap();
        let sum: Complex64 = eig.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-10);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let m = ComplexMatrix::zeros(257, 257);
        assert!(matches!(
            eigenvalues_dense(&m).err(),
            Some(Error::DimensionCap { dim: 257, max: 256 })
        ));
    }

    #[test]
    fn nilpotent_jordan_block_converges_to_zero() {
        let mut m = ComplexMatrix::zeros(4, 4);
        for i in 0..3 {
            m[(i, i + 1)] = Complex64::ONE;
        }
        let eig = eigenvalues_dense(&m).unwrap();
        for z in eig {
            assert!(z.norm() < 1e-3, "nilpotent eigenvalue estimate too large: {z}");
        }
    }
}

//! Dense complex linear-algebra kernels and brute-force oracles.
//!
//! Everything here is deliberately direct: partial-pivoting solves, Jacobi
//! singular values, shifted-QR eigenvalues. These are the reference
//! computations that every closed-form bound in the crate is checked against.

mod eigen;
mod jacobi;
mod lu;

pub use eigen::{eigenvalues_dense, MAX_EIGEN_DIM};
pub use jacobi::{hermitian_eigenvalues, singular_values};
pub use lu::LuFactors;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Relative residual allowed on a direct resolvent solve.
const RESOLVENT_RESIDUAL_TOL: f64 = 1e-10;

/// Entry magnitude past which matrix powers are declared divergent.
const POWER_OVERFLOW_LIMIT: f64 = 1e300;

/// Cap on the exponent range scanned by [`power_sup_norm`].
pub const MAX_POWER_EXPONENT: usize = 10_000;

/// Which induced operator norm to measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// Largest singular value (the 2 -> 2 induced norm).
    Spectral,
    /// Maximum column sum of entry moduli (the 1 -> 1 induced norm).
    OneToOne,
}

/// Largest singular value, accurate to about 1e-12 relative.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    let sv = singular_values(m)?;
    Ok(sv.first().copied().unwrap_or(0.0))
}

/// The 1 -> 1 induced norm: maximum over columns of the entry-modulus sum.
pub fn induced_one_norm(m: &ComplexMatrix) -> Result<f64> {
    m.require_finite()?;
    let mut best = 0.0f64;
    for j in 0..m.cols() {
        let sum: f64 = (0..m.rows()).map(|i| m[(i, j)].norm()).sum();
        best = best.max(sum);
    }
    Ok(best)
}

/// Direct dense resolvent `(z I - M)^-1` via partial-pivoting LU.
///
/// Rejects the solve unless the residual satisfies
/// `|(zI - M) R - I| <= 1e-10 |R|` in spectral norm, so a `z` that is
/// effectively an eigenvalue comes back as `Singular` rather than as noise.
pub fn resolvent_direct(m: &ComplexMatrix, zeta: Complex64) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    m.require_finite()?;
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::invalid("zeta", "must be finite"));
    }
    let shifted = m.shifted_from(zeta);
    let r = LuFactors::factor(&shifted)?.inverse();
    r.require_finite().map_err(|_| Error::Singular)?;
    let residual = shifted.mul(&r).sub(&ComplexMatrix::identity(n));
    if spectral_norm(&residual)? > RESOLVENT_RESIDUAL_TOL * spectral_norm(&r)? {
        return Err(Error::Singular);
    }
    Ok(r)
}

/// Max of the chosen norm over the powers `M^0 .. M^K`.
///
/// A lower bound on the true power-bound constant `sup_k |M^k|`; entries
/// past 1e300 abort with `PowerOverflow`, which is itself the verdict that
/// the input is not power-bounded at double precision.
pub fn power_sup_norm(m: &ComplexMatrix, kind: NormKind, k_max: usize) -> Result<f64> {
    let n = m.require_square()?;
    m.require_finite()?;
    if k_max > MAX_POWER_EXPONENT {
        return Err(Error::invalid(
            "k_max",
            format!("must be at most {MAX_POWER_EXPONENT}, got {k_max}"),
        ));
    }
    let norm_of = |p: &ComplexMatrix| -> Result<f64> {
        match kind {
            NormKind::Spectral => {
                // Entries near the overflow limit would overflow when the
                // Gram matrix squares them; factor the magnitude out first.
                let scale = p.max_abs();
                if scale > 1e100 {
                    Ok(scale * spectral_norm(&p.scale(Complex64::new(1.0 / scale, 0.0)))?)
                } else {
                    spectral_norm(p)
                }
            }
            NormKind::OneToOne => induced_one_norm(p),
        }
    };
    let mut power = ComplexMatrix::identity(n);
    let mut best = norm_of(&power)?;
    for k in 1..=k_max {
        power = power.mul(m);
        if !power.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
            || power.max_abs() > POWER_OVERFLOW_LIMIT
        {
            return Err(Error::PowerOverflow { k });
        }
        best = best.max(norm_of(&power)?);
    }
    Ok(best)
}

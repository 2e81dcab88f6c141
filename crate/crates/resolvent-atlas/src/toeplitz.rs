//! The lower-triangular Toeplitz family M_n(beta), the cotangent
//! characterization of its sup-norm, and the closed forms at beta in {0, 1, 2}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Residual magnitude below which a candidate theta counts as a root.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Maximum bisection iterations; the bracket halves to ULP size long before.
const MAX_BISECTIONS: usize = 200;

/// Parameters of one matrix in the family, optionally carrying its solved
/// norm angle.
///
/// `theta_star`, when present, must lie in the bracket
/// [(2n-1)pi/(2n), pi) and satisfy the cotangent residual equation to 1e-12.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToeplitzSpec {
    n: usize,
    beta: f64,
    theta_star: Option<f64>,
}

impl ToeplitzSpec {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "need at least one row"));
        }
        if !beta.is_finite() || !(0.0..=2.0).contains(&beta) {
            return Err(Error::invalid("beta", format!("need beta in [0, 2], got {beta}")));
        }
        Ok(Self { n, beta, theta_star: None })
    }

    /// Attach a norm angle after validating the bracket and residual
    /// invariants.
    pub fn with_theta_star(self, theta: f64) -> Result<Self> {
        let left = bracket_left(self.n);
        if !theta.is_finite() || theta < left - 1e-12 || theta >= std::f64::consts::PI {
            return Err(Error::invalid(
                "theta_star",
                format!("need theta in [{left}, pi), got {theta}"),
            ));
        }
        let residual = cot_residual(self.n, self.beta, theta);
        if residual.abs() > RESIDUAL_TOL {
            return Err(Error::invalid(
                "theta_star",
                format!("residual {residual:e} exceeds {RESIDUAL_TOL:e}"),
            ));
        }
        Ok(Self { theta_star: Some(theta), ..self })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta_star(&self) -> Option<f64> {
        self.theta_star
    }
}

/// Left endpoint (2n-1)pi/(2n) of the root bracket.
fn bracket_left(n: usize) -> f64 {
    (2.0 * n as f64 - 1.0) * std::f64::consts::PI / (2.0 * n as f64)
}

/// The n x n matrix with unit diagonal, every strictly-lower entry beta, and
/// zeros above.
pub fn toeplitz_matrix(spec: &ToeplitzSpec) -> ComplexMatrix {
    let n = spec.n;
    let mut matrix = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = Complex64::ONE;
        for j in 0..i {
            matrix[(i, j)] = Complex64::new(spec.beta, 0.0);
        }
    }
    matrix
}

/// The norm-angle residual beta cot(n theta) + (2 - beta) cot(theta/2).
///
/// Intended for theta in the bracket [(2n-1)pi/(2n), pi), where cot(n theta)
/// has its only pole at the right endpoint; evaluation at a pole returns a
/// signed-infinity sentinel (plain IEEE division) rather than an error so
/// that bracketing searches can keep going.
pub fn cot_residual(n: usize, beta: f64, theta: f64) -> f64 {
    let half = {
        let x = theta / 2.0;
        x.cos() / x.sin()
    };
    let mut residual = (2.0 - beta) * half;
    if beta != 0.0 {
        let x = n as f64 * theta;
        residual += beta * x.cos() / x.sin();
    }
    residual
}

/// Unique root of [`cot_residual`] in [(2n-1)pi/(2n), pi).
///
/// The residual is positive just right of the left endpoint and tends to
/// -infinity at pi, with a proved sign change in between; bisection is
/// unconditionally convergent there. The bracket shrinks well below the
/// guaranteed 1e-14 (down to spacing of adjacent doubles) so that the
/// residual at the returned midpoint stays within [`RESIDUAL_TOL`] even for
/// large n, where the residual's slope grows like beta n. A left endpoint
/// whose residual is already below tolerance (the beta = 2 case, where
/// cot(n theta) vanishes there) is returned directly.
pub fn solve_theta_star(n: usize, beta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one row"));
    }
    if !beta.is_finite() || beta <= 0.0 || beta > 2.0 {
        return Err(Error::invalid("beta", format!("need beta in (0, 2], got {beta}")));
    }
    let left = bracket_left(n);
    if cot_residual(n, beta, left).abs() <= RESIDUAL_TOL {
        return Ok(left);
    }

    let mut a = left + 1e-13;
    let mut b = std::f64::consts::PI - 1e-13;
    let fa = cot_residual(n, beta, a);
    let fb = cot_residual(n, beta, b);
    if !(fa > 0.0) || !(fb < 0.0) {
        return Err(Error::BracketSignCheck { left: a, right: b });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // the interval has collapsed to adjacent doubles
        }
        if cot_residual(n, beta, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-15 {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sup-norm of M_n(beta) through the closed form
///
/// ||M_n(beta)|| = 1/2 sqrt((beta - 2)^2 + beta^2 tan^2(theta*/2)),
///
/// evaluated in the tangent form so nothing blows up as theta* approaches pi.
/// beta = 0 and n = 1 short-circuit to 1 (continuous extension and the 1x1
/// identity respectively).
pub fn toeplitz_norm(n: usize, beta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one row"));
    }
    if !beta.is_finite() || !(0.0..=2.0).contains(&beta) {
        return Err(Error::invalid("beta", format!("need beta in [0, 2], got {beta}")));
    }
    if beta == 0.0 || n == 1 {
        return Ok(1.0);
    }
    let theta = solve_theta_star(n, beta)?;
    let tan_half = (theta / 2.0).tan();
    Ok(0.5 * ((beta - 2.0).powi(2) + beta * beta * tan_half * tan_half).sqrt())
}

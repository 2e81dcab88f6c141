//! Matrix representations of the model operator, its resolvent, and the
//! extremal contractions A_n(a), all in the Malmquist-Walsh basis.

use num_complex::Complex64;

use crate::blaschke::Spectrum;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Matching the resolvent guard: closed-form entries blow up as 1/dist, so
/// anything closer is numerically meaningless in double precision.
pub const RESOLVENT_ZETA_MARGIN: f64 = 1e-10;

/// The model operator as an explicit lower-triangular contraction.
///
/// Entry (i, j) for i > j is s_i s_j prod_{u=j+1}^{i-1} (-conj(l_u)) with
/// s_k = sqrt(1 - |l_k|^2); the diagonal carries the eigenvalues. The matrix
/// depends on the spectrum ordering, but its singular values (and those of
/// its resolvent) do not — different orderings are unitarily equivalent.
#[derive(Clone, Debug)]
pub struct ModelOperator {
    spectrum: Spectrum,
    matrix: ComplexMatrix,
}

impl ModelOperator {
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

fn defect(l: Complex64) -> f64 {
    (1.0 - l.norm_sqr()).max(0.0).sqrt()
}

/// Build the model operator matrix for the given spectrum.
///
/// The closed form never divides by eigenvalue differences, so repeated
/// eigenvalues are fine: the n-fold spectrum {a} produces exactly the
/// extremal matrix A_n(a).
pub fn model_operator_matrix(spectrum: &Spectrum) -> ModelOperator {
    let points = spectrum.points();
    let m = points.len();
    let defects: Vec<f64> = points.iter().map(|&l| defect(l)).collect();
    let mut matrix = ComplexMatrix::zeros(m, m);
    for j in 0..m {
        matrix[(j, j)] = points[j];
        // Walk down column j, extending prod_{u=j+1}^{i-1} (-conj(l_u)) one
        // factor at a time.
        let mut chain = Complex64::ONE;
        for i in j + 1..m {
            if i > j + 1 {
                chain *= -points[i - 1].conj();
            }
            matrix[(i, j)] = chain * (defects[i] * defects[j]);
        }
    }
    ModelOperator { spectrum: spectrum.clone(), matrix }
}

/// Closed-form resolvent (zeta - M)^-1 of the model operator.
///
/// Entry (i, j) for i > j is
/// (s_i/(zeta - l_i)) (s_j/(zeta - l_j)) prod_{u=j+1}^{i-1} (1 - conj(l_u) zeta)/(zeta - l_u),
/// the diagonal is 1/(zeta - l_i), and everything above vanishes.
pub fn model_resolvent_matrix(spectrum: &Spectrum, zeta: Complex64) -> Result<ComplexMatrix> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::invalid("zeta", "must be finite"));
    }
    let distance = spectrum.min_distance_to(zeta);
    if distance < RESOLVENT_ZETA_MARGIN {
        return Err(Error::ZetaOnSpectrum { distance });
    }
    let points = spectrum.points();
    let m = points.len();
    let scaled: Vec<Complex64> = points
        .iter()
        .map(|&l| Complex64::new(defect(l), 0.0) / (zeta - l))
        .collect();
    let mut matrix = ComplexMatrix::zeros(m, m);
    for j in 0..m {
        matrix[(j, j)] = Complex64::ONE / (zeta - points[j]);
        let mut chain = Complex64::ONE;
        for i in j + 1..m {
            if i > j + 1 {
                let u = points[i - 1];
                chain *= (Complex64::ONE - u.conj() * zeta) / (zeta - u);
            }
            matrix[(i, j)] = scaled[i] * scaled[j] * chain;
        }
    }
    Ok(matrix)
}

/// Evaluate the k-th Malmquist-Walsh basis function (one-based) at z in the
/// closed unit disk:
///
/// e_k(z) = sqrt(1 - |l_k|^2)/(1 - conj(l_k) z) * prod_{i<k} (z - l_i)/(1 - conj(l_i) z).
pub fn malmquist_walsh_eval(spectrum: &Spectrum, k: usize, z: Complex64) -> Result<Complex64> {
    let m = spectrum.degree();
    if k < 1 || k > m {
        return Err(Error::IndexRange { what: "k", got: k, limit: m });
    }
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::invalid("z", "must lie in the closed unit disk"));
    }
    let points = spectrum.points();
    let lk = points[k - 1];
    let mut value = Complex64::new(defect(lk), 0.0) / (Complex64::ONE - lk.conj() * z);
    for &l in &points[..k - 1] {
        value *= (z - l) / (Complex64::ONE - l.conj() * z);
    }
    Ok(value)
}

/// The n x n extremal contraction A_n(a): diagonal a and entry
/// (i, j) = (-a)^(i-j-1) (1 - a^2) below it.
///
/// This is exactly the model operator of the n-fold spectrum {a}; as a -> 1
/// the scaled resolvent (1 - a)(1 - A_n(a))^-1 approaches the extremal
/// Toeplitz matrix with unit diagonal and constant sub-diagonals 2.
pub fn extremal_contraction(n: usize, a: f64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one row"));
    }
    if !a.is_finite() || a <= 0.0 || a >= 1.0 {
        return Err(Error::invalid("a", format!("need a strictly in (0, 1), got {a}")));
    }
    let mut matrix = ComplexMatrix::zeros(n, n);
    let gap = 1.0 - a * a;
    for j in 0..n {
        matrix[(j, j)] = Complex64::new(a, 0.0);
        let mut power = gap;
        for i in j + 1..n {
            matrix[(i, j)] = Complex64::new(power, 0.0);
            power *= -a;
        }
    }
    Ok(matrix)
}

//! Stability analysis of classical and quantum Markov chains.
//!
//! The condition number of a chain measures how far its stationary state can
//! move under a perturbation of the transition map. For a column-stochastic
//! matrix `T` with unique stationary distribution, the classical condition
//! number is
//!
//! `kappa_cl = sup { ||Z d||_1 / ||d||_1 : entries of d sum to 0 }`
//!
//! where `Z = (I - T + Tinf)^{-1}` is the fundamental inverse and `Tinf` the
//! projection onto the stationary state. The quantum analogue replaces
//! vectors by traceless Hermitian matrices and the entry sum by the trace,
//! with the Schatten 1-norm throughout.
//!
//! Both condition numbers sit in a spectral sandwich. The map `T - Tinf` has
//! `1 -> 1` power bound 2 (`||T^k - Tinf|| <= ||T^k|| + ||Tinf|| <= 2`), so
//! the power-bounded resolvent machinery applies with `C = 2` at `zeta = 1`
//! and yields upper bounds proportional to `2 sqrt(16e - 4)` times the
//! dimension over `min |1 - lambda|`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use crate::error::{Error, Result};
use crate::linalg::{self, LuFactors};
use crate::matrix::ComplexMatrix;
use crate::sampling;

/// Entries of a stochastic matrix may undershoot zero by at most this much.
pub const STOCHASTIC_ENTRY_TOL: f64 = 1e-12;

/// Column sums of a stochastic matrix must equal 1 within this tolerance.
pub const COLUMN_SUM_TOL: f64 = 1e-10;

/// Residual tolerance for the stationary projection and fundamental inverse
/// certificates.
pub const PROJECTION_RESIDUAL_TOL: f64 = 1e-8;

/// Tolerance at which the unit eigenvalue counts as simple: classically the
/// second-largest eigenvalue modulus must stay below `1 - 1e-9`; for
/// channels no second eigenvalue may sit within `1e-9` of 1.
pub const SIMPLICITY_GAP: f64 = 1e-9;

/// Largest chain size accepted by the exact condition-number scan.
pub const MAX_KAPPA_DIM: usize = 64;

/// Below this value of `min |1 - lambda|` the chain counts as non-ergodic
/// and the spectral bounds are refused.
const ERGODICITY_TOL: f64 = 1e-12;
/// A validated stochastic matrix always has the eigenvalue 1; if the
/// eigensolve misses it by more than this, the spectrum is unusable.
const PERRON_EIGENVALUE_TOL: f64 = 1e-8;

/// Trace-preservation defect allowed when admitting a superoperator.
const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// Monte-Carlo sample ranges of this size get independent derived seeds, so
/// parallel evaluation is deterministic regardless of thread count.
const MC_CHUNK: usize = 64;

/// A validated column-stochastic transition matrix together with lazily
/// computed derived objects: the stationary projection `Tinf`, the
/// fundamental inverse `Z`, and the spectrum of `T - Tinf`.
#[derive(Clone, Debug)]
pub struct MarkovModel {
    transition: ComplexMatrix,
    stationary_projection: Option<ComplexMatrix>,
    fundamental_inverse: Option<ComplexMatrix>,
    sub_spectrum: Option<Vec<Complex64>>,
}

impl MarkovModel {
    pub fn transition(&self) -> &ComplexMatrix {
        &self.transition
    }

    pub fn dimension(&self) -> usize {
        self.transition.rows()
    }

    /// The cached projection, if [`stationary_projection`] has run.
    pub fn cached_stationary_projection(&self) -> Option<&ComplexMatrix> {
        self.stationary_projection.as_ref()
    }

    /// The cached fundamental inverse, if [`fundamental_inverse`] has run.
    pub fn cached_fundamental_inverse(&self) -> Option<&ComplexMatrix> {
        self.fundamental_inverse.as_ref()
    }

    /// The cached spectrum of `T - Tinf`, if [`kappa_cl_bounds`] has run.
    pub fn cached_sub_spectrum(&self) -> Option<&[Complex64]> {
        self.sub_spectrum.as_deref()
    }
}

/// Validates that `t` is a real column-stochastic matrix: entries at least
/// `-1e-12` with negligible imaginary part, every column summing to 1 within
/// `1e-10`. The error message lists each violated column (one-based).
pub fn validate_stochastic(t: ComplexMatrix) -> Result<MarkovModel> {
    let n = t.require_square()?;
    t.require_finite()?;
    let mut complaints: Vec<String> = Vec::new();
    for col in 0..n {
        let mut sum = 0.0_f64;
        let mut column_ok = true;
        for row in 0..n {
            let entry = t[(row, col)];
            if entry.im.abs() > STOCHASTIC_ENTRY_TOL {
                column_ok = false;
                complaints.push(format!(
                    "column {}: entry at row {} has imaginary part {:e}",
                    col + 1,
                    row + 1,
                    entry.im
                ));
                break;
            }
            if entry.re < -STOCHASTIC_ENTRY_TOL {
                column_ok = false;
                complaints.push(format!(
                    "column {}: negative entry {:e} at row {}",
                    col + 1,
                    entry.re,
                    row + 1
                ));
                break;
            }
            sum += entry.re;
        }
        if column_ok && (sum - 1.0).abs() > COLUMN_SUM_TOL {
            complaints.push(format!("column {}: entries sum to {sum}", col + 1));
        }
    }
    if !complaints.is_empty() {
        return Err(Error::NotStochastic {
            summary: complaints.join("; "),
        });
    }
    Ok(MarkovModel {
        transition: t,
        stationary_projection: None,
        fundamental_inverse: None,
        sub_spectrum: None,
    })
}

/// Solves for the stationary distribution of a chain whose unit eigenvalue
/// is already certified simple: the bordered system `(I - T + J/n) x = 1/n`
/// has the stationary vector as its unique solution, and a few applications
/// of `T` polish the zero-sum error components.
fn solve_stationary(t: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = t.rows();
    let shift = 1.0 / n as f64;
    let system = ComplexMatrix::from_fn(n, n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        Complex64::new(identity + shift, 0.0) - t[(i, j)]
    })?;
    let rhs = vec![Complex64::new(shift, 0.0); n];
    let mut pi: Vec<f64> = LuFactors::factor(&system)?
        .solve_vec(&rhs)
        .iter()
        .map(|z| z.re)
        .collect();
    for _ in 0..5 {
        let applied = t.mul_vec(
            &pi.iter()
                .map(|&p| Complex64::new(p, 0.0))
                .collect::<Vec<_>>(),
        );
        let total: f64 = applied.iter().map(|z| z.re).sum();
        if total.abs() < f64::MIN_POSITIVE.sqrt() {
            return Err(Error::NonUniqueStationary);
        }
        for (slot, value) in pi.iter_mut().zip(applied.iter()) {
            *slot = value.re / total;
        }
    }
    Ok(pi)
}

/// The rank-one projection `Tinf = pi * (1, ..., 1)` onto the stationary
/// state. Requires the unit eigenvalue of `T` to be simple with a genuine
/// spectral gap: the second-largest eigenvalue modulus must stay below
/// `1 - 1e-9`. The result is cached on the model and certified to satisfy
/// `T Tinf = Tinf T = Tinf = Tinf^2` within `1e-8`.
pub fn stationary_projection(model: &mut MarkovModel) -> Result<ComplexMatrix> {
    if let Some(cached) = &model.stationary_projection {
        return Ok(cached.clone());
    }
    let t = &model.transition;
    let n = t.rows();
    let eigenvalues = linalg::eigenvalues_dense(t)?;
    if eigenvalues.len() >= 2 && eigenvalues[1].norm() > 1.0 - SIMPLICITY_GAP {
        return Err(Error::NonUniqueStationary);
    }
    let pi = solve_stationary(t)?;
    let projection = ComplexMatrix::from_fn(n, n, |i, _| Complex64::new(pi[i], 0.0))?;
    let residual = t
        .mul(&projection)
        .sub(&projection)
        .max_abs()
        .max(projection.mul(t).sub(&projection).max_abs())
        .max(projection.mul(&projection).sub(&projection).max_abs());
    if residual > PROJECTION_RESIDUAL_TOL {
        return Err(Error::invalid(
            "transition",
            format!(
                "stationary projection residual {residual:e} exceeds 1e-8; \
                 the chain is too ill-conditioned to certify"
            ),
        ));
    }
    model.stationary_projection = Some(projection.clone());
    Ok(projection)
}

/// The fundamental inverse `Z = (I - T + Tinf)^{-1}`, certified by the
/// residual check `|Z (I - T + Tinf) - I| <= 1e-8` and cached on the model.
pub fn fundamental_inverse(model: &mut MarkovModel) -> Result<ComplexMatrix> {
    if let Some(cached) = &model.fundamental_inverse {
        return Ok(cached.clone());
    }
    let projection = stationary_projection(model)?;
    let n = model.transition.rows();
    let system = ComplexMatrix::identity(n)
        .sub(&model.transition)
        .add(&projection);
    let z = LuFactors::factor(&system)?.inverse();
    let residual = z.mul(&system).sub(&ComplexMatrix::identity(n)).max_abs();
    if residual > PROJECTION_RESIDUAL_TOL {
        return Err(Error::Singular);
    }
    model.fundamental_inverse = Some(z.clone());
    Ok(z)
}

/// Exact classical condition number for chains with at most 64 states.
///
/// The zero-sum slice of the `l1` unit ball is a polytope with vertices
/// `(e_i - e_j) / 2`, so the supremum defining `kappa_cl` is attained at
/// one of the `n (n-1) / 2` column differences of `Z`.
pub fn kappa_cl_exact(model: &mut MarkovModel) -> Result<f64> {
    let n = model.transition.rows();
    if n > MAX_KAPPA_DIM {
        return Err(Error::DimensionCap {
            dim: n,
            max: MAX_KAPPA_DIM,
        });
    }
    let z = fundamental_inverse(model)?;
    let mut best = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let sum: f64 = (0..n).map(|row| (z[(row, i)] - z[(row, j)]).norm()).sum();
            best = best.max(sum / 2.0);
        }
    }
    Ok(best)
}

/// Spectral sandwich for the classical condition number.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KappaClBounds {
    /// `1 / min |1 - lambda|` over the non-unit eigenvalues of `T`.
    pub lower: f64,
    /// The literature bound `n / min |1 - lambda|`, same eigenvalue set.
    pub upper_cited: f64,
    /// The power-bounded resolvent bound `2 sqrt(16e - 4) n / min |1 - lambda|`
    /// over the spectrum of `T - Tinf` (the constant comes from `C = 2` for
    /// `T - Tinf` in the `1 -> 1` norm).
    pub upper_new: f64,
}

/// Lower and upper spectral bounds on `kappa_cl`. Errors when the non-unit
/// spectrum of `T` comes within `1e-12` of 1, i.e. when the chain is
/// effectively non-ergodic.
///
/// The two-sided sandwich (`lower`, `upper_cited`) is taken over the genuine
/// non-unit eigenvalues of `T`: the unit ball of the zero-column-sum
/// subspace has the `(e_i - e_j)/2` vertices, the fundamental inverse acts
/// on that subspace with eigenvalues `1/(1 - lambda)`, and a spectral
/// radius never exceeds an operator norm — so the lower bound is sound on
/// exactly that eigenvalue set. `T - Tinf` instead swaps the unit
/// eigenvalue for an extra zero; oscillatory chains with every
/// `|1 - lambda| > 1` have `kappa_cl < 1`, which the extra zero would
/// contradict. The resolvent bound `upper_new` genuinely concerns
/// `T - Tinf`, whose spectrum at the evaluation point 1 yields
/// `min(1, min |1 - lambda|)` in the denominator; the call caches that
/// difference spectrum on the model for reporting.
pub fn kappa_cl_bounds(model: &mut MarkovModel) -> Result<KappaClBounds> {
    let projection = stationary_projection(model)?;
    if model.sub_spectrum.is_none() {
        let computed = linalg::eigenvalues_dense(&model.transition.sub(&projection))?;
        model.sub_spectrum = Some(computed);
    }
    let spectrum = linalg::eigenvalues_dense(&model.transition)?;
    let perron = spectrum
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let da = (Complex64::ONE - *a).norm();
            let db = (Complex64::ONE - *b).norm();
            da.partial_cmp(&db).expect("finite eigenvalue distances")
        })
        .map(|(i, _)| i)
        .expect("validated transition matrix is non-empty");
    let perron_gap = (Complex64::ONE - spectrum[perron]).norm();
    if perron_gap > PERRON_EIGENVALUE_TOL {
        return Err(Error::invalid(
            "transition",
            format!(
                "no eigenvalue within {PERRON_EIGENVALUE_TOL:e} of 1 (closest is off by \
                 {perron_gap:e}); the eigensolve is not trustworthy here"
            ),
        ));
    }
    let min = spectrum
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != perron)
        .map(|(_, l)| (Complex64::ONE - l).norm())
        .fold(f64::INFINITY, f64::min);
    if min < ERGODICITY_TOL {
        return Err(Error::invalid(
            "transition",
            format!("min |1 - lambda| = {min:e} over the non-unit spectrum; the chain is effectively non-ergodic"),
        ));
    }
    let n = model.transition.rows() as f64;
    Ok(KappaClBounds {
        lower: 1.0 / min,
        upper_cited: n / min,
        upper_new: 2.0 * (16.0 * E - 4.0).sqrt() * n / min.min(1.0),
    })
}

/// A trace-preserving superoperator on vectorized `n x n` matrices
/// (column-stacking convention: entry `(i, j)` of `X` sits at vec index
/// `j n + i`, so `vec(A X B) = (B^T kron A) vec(X)`).
#[derive(Clone, Debug)]
pub struct QuantumChannelModel {
    superoperator: ComplexMatrix,
    dimension: usize,
}

impl QuantumChannelModel {
    /// Admits an `n^2 x n^2` matrix after checking trace preservation: the
    /// rows corresponding to the trace functional must reproduce the trace,
    /// i.e. `sum_i S[(i n + i), c]` equals 1 on diagonal vec indices `c`
    /// and 0 elsewhere, within `1e-10`.
    pub fn new(superoperator: ComplexMatrix) -> Result<Self> {
        let side = superoperator.require_square()?;
        superoperator.require_finite()?;
        let n = (side as f64).sqrt().round() as usize;
        if n == 0 || n * n != side {
            return Err(Error::invalid(
                "superoperator",
                format!("side length {side} is not the square of a matrix dimension"),
            ));
        }
        let mut defect = 0.0_f64;
        for col in 0..side {
            let mut total = Complex64::ZERO;
            for i in 0..n {
                total += superoperator[(i * n + i, col)];
            }
            let expected = if col % (n + 1) == 0 { 1.0 } else { 0.0 };
            defect = defect.max((total - expected).norm());
        }
        if defect > TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(Self {
            superoperator,
            dimension: n,
        })
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superoperator
    }

    /// System dimension `n` (the superoperator is `n^2 x n^2`).
    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Superoperator of the unitary conjugation channel `X -> U X U*`, namely
/// `conj(U) kron U` in the column-stacking convention. Verifies that `U` is
/// unitary to within `1e-8`.
pub fn unitary_conjugation(u: &ComplexMatrix) -> Result<QuantumChannelModel> {
    let n = u.require_square()?;
    let defect = u
        .adjoint()
        .mul(u)
        .sub(&ComplexMatrix::identity(n))
        .max_abs();
    if defect > 1e-8 {
        return Err(Error::invalid(
            "u",
            format!("matrix is not unitary (defect {defect:e})"),
        ));
    }
    let conj_u = u.adjoint().transpose();
    QuantumChannelModel::new(conj_u.kronecker(u))
}

/// Superoperator of the completely depolarizing channel `X -> tr(X) I / n`.
pub fn completely_depolarizing(n: usize) -> Result<QuantumChannelModel> {
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be at least 1"));
    }
    let scale = 1.0 / n as f64;
    let s = ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r % (n + 1) == 0 && c % (n + 1) == 0 {
            Complex64::new(scale, 0.0)
        } else {
            Complex64::ZERO
        }
    })?;
    QuantumChannelModel::new(s)
}

/// Stationary state of the channel as a vectorized density matrix,
/// normalized to unit trace, via the same bordered solve as the classical
/// case (the trace functional plays the role of the all-ones row).
fn channel_stationary_vec(q: &QuantumChannelModel) -> Result<Vec<Complex64>> {
    let n = q.dimension();
    let side = n * n;
    let s = q.superoperator();
    let eigenvalues = linalg::eigenvalues_dense(s)?;
    let near_unit = eigenvalues
        .iter()
        .filter(|l| (*l - Complex64::ONE).norm() <= SIMPLICITY_GAP)
        .count();
    if near_unit != 1 {
        return Err(Error::NonUniqueStationary);
    }
    let scale = 1.0 / n as f64;
    let trace_row = |c: usize| -> f64 {
        if c % (n + 1) == 0 {
            1.0
        } else {
            0.0
        }
    };
    let system = ComplexMatrix::from_fn(side, side, |r, c| {
        let identity = if r == c { 1.0 } else { 0.0 };
        let border = if r % (n + 1) == 0 { scale * trace_row(c) } else { 0.0 };
        Complex64::new(identity + border, 0.0) - s[(r, c)]
    })?;
    let rhs: Vec<Complex64> = (0..side)
        .map(|r| {
            if r % (n + 1) == 0 {
                Complex64::new(scale, 0.0)
            } else {
                Complex64::ZERO
            }
        })
        .collect();
    let mut v = LuFactors::factor(&system)?.solve_vec(&rhs);
    for _ in 0..3 {
        let applied = s.mul_vec(&v);
        let trace: Complex64 = (0..n).map(|i| applied[i * n + i]).sum();
        if trace.norm() < f64::MIN_POSITIVE.sqrt() {
            return Err(Error::NonUniqueStationary);
        }
        v = applied.iter().map(|z| z / trace).collect();
    }
    Ok(v)
}

/// Fundamental inverse of a channel on the superoperator level:
/// `Z = (I - S + Sinf)^{-1}` with `Sinf = vec(rho_inf) vec(I)^T`, certified
/// by the same `1e-8` residual as the classical case.
pub fn quantum_fundamental_inverse(q: &QuantumChannelModel) -> Result<ComplexMatrix> {
    let n = q.dimension();
    let side = n * n;
    let stationary = channel_stationary_vec(q)?;
    let projection = ComplexMatrix::from_fn(side, side, |r, c| {
        if c % (n + 1) == 0 {
            stationary[r]
        } else {
            Complex64::ZERO
        }
    })?;
    let system = ComplexMatrix::identity(side)
        .sub(q.superoperator())
        .add(&projection);
    let z = LuFactors::factor(&system)?.inverse();
    let residual = z.mul(&system).sub(&ComplexMatrix::identity(side)).max_abs();
    if residual > PROJECTION_RESIDUAL_TOL {
        return Err(Error::Singular);
    }
    Ok(z)
}

/// Spectral sandwich for the quantum condition number.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KappaQuBounds {
    /// `1 / min |1 - lambda|` over the non-unit spectrum of the channel.
    pub lower: f64,
    /// `2 sqrt(16e - 4) n^2 / min |1 - lambda|`.
    pub upper: f64,
}

/// Spectral bounds on `kappa_qu` from the non-unit eigenvalues
/// `Lambda = sigma(S) minus {1}` of the superoperator itself. Errors when
/// the unit eigenvalue is degenerate (a second eigenvalue within `1e-9` of
/// 1) and, through the dense eigensolver, when `n^2 > 256`.
pub fn kappa_qu_bounds(q: &QuantumChannelModel) -> Result<KappaQuBounds> {
    let eigenvalues = linalg::eigenvalues_dense(q.superoperator())?;
    let (unit_index, unit_distance) = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, l)| (i, (l - Complex64::ONE).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("spectrum of a square matrix is non-empty");
    if unit_distance > 1e-6 {
        return Err(Error::invalid(
            "superoperator",
            format!("no eigenvalue within 1e-6 of 1 (closest at distance {unit_distance:e})"),
        ));
    }
    let non_unit: Vec<Complex64> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != unit_index)
        .map(|(_, l)| *l)
        .collect();
    if non_unit
        .iter()
        .any(|l| (l - Complex64::ONE).norm() <= SIMPLICITY_GAP)
    {
        return Err(Error::NonUniqueStationary);
    }
    let min = non_unit
        .iter()
        .map(|l| (Complex64::ONE - l).norm())
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::invalid(
            "superoperator",
            "a channel on a 1-dimensional system has no non-unit spectrum",
        ));
    }
    let n_squared = (q.dimension() * q.dimension()) as f64;
    Ok(KappaQuBounds {
        lower: 1.0 / min,
        upper: 2.0 * (16.0 * E - 4.0).sqrt() * n_squared / min,
    })
}

/// Schatten 1-norm of a Hermitian (or nearly Hermitian) matrix: the
/// absolute eigenvalue sum of its Hermitian part. For the nearly Hermitian
/// images produced by the fundamental inverse this never overestimates the
/// true Schatten norm, which keeps the Monte-Carlo witness a lower bound.
fn schatten_one_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let symmetrized = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
    Ok(linalg::hermitian_eigenvalues(&symmetrized)?
        .iter()
        .map(|mu| mu.abs())
        .sum())
}

/// Random traceless Hermitian matrix with unit Schatten 1-norm.
fn random_traceless_hermitian(
    rng: &mut impl rand::Rng,
    n: usize,
) -> Result<ComplexMatrix> {
    loop {
        let g = sampling::ginibre(rng, n);
        let mut h = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
        let shift = h.trace() / n as f64;
        for i in 0..n {
            h[(i, i)] -= shift;
        }
        let norm = schatten_one_hermitian(&h)?;
        if norm > 1e-9 {
            return Ok(h.scale(Complex64::new(1.0 / norm, 0.0)));
        }
    }
}

/// Monte-Carlo lower witness for `kappa_qu`: the maximum of `||Z(sigma)||_1`
/// over `samples` random traceless Hermitian `sigma` of unit Schatten
/// 1-norm. Every sampled value is a certified lower bound on the supremum
/// defining `kappa_qu`. Sampling runs in parallel over fixed-size ranges
/// with per-range derived seeds, so the result depends only on `seed` and
/// `samples`, never on the thread count.
pub fn kappa_qu_monte_carlo_lower(
    q: &QuantumChannelModel,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Ok(0.0);
    }
    let z = quantum_fundamental_inverse(q)?;
    let n = q.dimension();
    let ranges: Vec<(u64, usize)> = (0..samples)
        .step_by(MC_CHUNK)
        .enumerate()
        .map(|(index, start)| (index as u64, MC_CHUNK.min(samples - start)))
        .collect();
    let per_range: Result<Vec<f64>> = ranges
        .par_iter()
        .map(|&(index, count)| {
            let mut rng =
                sampling::rng_from_seed(seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index + 1));
            let mut local = 0.0_f64;
            for _ in 0..count {
                let sigma = random_traceless_hermitian(&mut rng, n)?;
                let image_vec = z.mul_vec(&column_stack(&sigma));
                let image = ComplexMatrix::new(n, n, image_vec_to_matrix(&image_vec, n))?;
                local = local.max(schatten_one_hermitian(&image)?);
            }
            Ok(local)
        })
        .collect();
    Ok(per_range?
        .into_iter()
        .fold(0.0_f64, f64::max))
}

/// Column-stacks a square matrix into the vector layout the superoperator
/// acts on.
fn column_stack(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.rows();
    let mut v = vec![Complex64::ZERO; n * n];
    for col in 0..n {
        for row in 0..n {
            v[col * n + row] = m[(row, col)];
        }
    }
    v
}

/// Reorders a column-stacked vector into the row-major entry layout of
/// [`ComplexMatrix`].
fn image_vec_to_matrix(v: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut entries = vec![Complex64::ZERO; n * n];
    for col in 0..n {
        for row in 0..n {
            entries[row * n + col] = v[col * n + row];
        }
    }
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::NormKind;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn uniform_chain(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(1.0 / n as f64, 0.0)).unwrap()
    }

    fn two_state(p: f64, q: f64) -> ComplexMatrix {
        ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.0 - p, 0.0),
                Complex64::new(q, 0.0),
                Complex64::new(p, 0.0),
                Complex64::new(1.0 - q, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation_accepts_and_rejects() {
        assert!(validate_stochastic(uniform_chain(4)).is_ok());
        assert!(validate_stochastic(ComplexMatrix::identity(3)).is_ok());
        let bad = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.9, 0.0),
            ],
        )
        .unwrap();
        match validate_stochastic(bad) {
            Err(Error::NotStochastic { summary }) => {
                assert!(summary.contains("column 2"), "summary: {summary}");
            }
            other => panic!("expected stochastic failure, got {other:?}"),
        }
        let negative = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.1, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-0.1, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            validate_stochastic(negative),
            Err(Error::NotStochastic { .. })
        ));
    }

    #[test]
    fn stationary_projection_examples() {
        let mut uniform = validate_stochastic(uniform_chain(5)).unwrap();
        let projection = stationary_projection(&mut uniform).unwrap();
        assert!(projection.sub(&uniform_chain(5)).max_abs() < 1e-10);

        let mut symmetric = validate_stochastic(two_state(0.5, 0.5)).unwrap();
        let projection = stationary_projection(&mut symmetric).unwrap();
        assert!(projection.sub(&uniform_chain(2)).max_abs() < 1e-10);

        let mut identity = validate_stochastic(ComplexMatrix::identity(3)).unwrap();
        assert!(matches!(
            stationary_projection(&mut identity),
            Err(Error::NonUniqueStationary)
        ));
    }

    #[test]
    fn fundamental_inverse_examples() {
        let mut uniform = validate_stochastic(uniform_chain(4)).unwrap();
        let z = fundamental_inverse(&mut uniform).unwrap();
        assert!(z.sub(&ComplexMatrix::identity(4)).max_abs() < 1e-9);

        let mut symmetric = validate_stochastic(two_state(0.5, 0.5)).unwrap();
        let z = fundamental_inverse(&mut symmetric).unwrap();
        assert!(z.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-9);

        // Hand-checked fixture: T = [[0.7, 0.1], [0.3, 0.9]] has stationary
        // distribution (0.25, 0.75) and Z = [[2.125, -0.375], [-1.125, 1.375]].
        let mut chain = validate_stochastic(two_state(0.3, 0.1)).unwrap();
        let z = fundamental_inverse(&mut chain).unwrap();
        let expected = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(2.125, 0.0),
                Complex64::new(-0.375, 0.0),
                Complex64::new(-1.125, 0.0),
                Complex64::new(1.375, 0.0),
            ],
        )
        .unwrap();
        assert!(z.sub(&expected).max_abs() < 1e-10, "Z = {z:?}");
        let projection = chain.cached_stationary_projection().unwrap();
        assert_relative_eq!(projection[(0, 0)].re, 0.25, max_relative = 1e-10);
        assert_relative_eq!(projection[(1, 1)].re, 0.75, max_relative = 1e-10);
    }

    #[test]
    fn kappa_cl_hand_values() {
        let mut uniform = validate_stochastic(uniform_chain(6)).unwrap();
        assert_relative_eq!(
            kappa_cl_exact(&mut uniform).unwrap(),
            1.0,
            max_relative = 1e-10
        );
        let bounds = kappa_cl_bounds(&mut uniform).unwrap();
        assert_relative_eq!(bounds.lower, 1.0, max_relative = 1e-9);
        assert_relative_eq!(bounds.upper_cited, 6.0, max_relative = 1e-9);
        assert_relative_eq!(
            bounds.upper_new,
            2.0 * (16.0 * E - 4.0).sqrt() * 6.0,
            max_relative = 1e-9
        );

        let mut symmetric = validate_stochastic(two_state(0.5, 0.5)).unwrap();
        assert_relative_eq!(
            kappa_cl_exact(&mut symmetric).unwrap(),
            1.0,
            max_relative = 1e-10
        );

        // For the 2-state chain with p = 0.3, q = 0.1 the sub-stationary
        // spectrum is {0, 0.6}: the sandwich is exact at the lower end.
        let mut chain = validate_stochastic(two_state(0.3, 0.1)).unwrap();
        let kappa = kappa_cl_exact(&mut chain).unwrap();
        assert_relative_eq!(kappa, 2.5, max_relative = 1e-10);
        let bounds = kappa_cl_bounds(&mut chain).unwrap();
        assert_relative_eq!(bounds.lower, 2.5, max_relative = 1e-9);
        assert_relative_eq!(bounds.upper_cited, 5.0, max_relative = 1e-9);
        assert_relative_eq!(
            bounds.upper_new,
            10.0 * (16.0 * E - 4.0).sqrt(),
            max_relative = 1e-9
        );
        let spectrum = chain.cached_sub_spectrum().unwrap();
        assert_eq!(spectrum.len(), 2);
        let mut moduli: Vec<f64> = spectrum.iter().map(|l| l.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!(moduli[0] < 1e-9 && (moduli[1] - 0.6).abs() < 1e-9);
    }

    #[test]
    fn kappa_cl_rejects_oversized_chains() {
        let mut big = validate_stochastic(uniform_chain(65)).unwrap();
        assert!(matches!(
            kappa_cl_exact(&mut big),
            Err(Error::DimensionCap { dim: 65, max: 64 })
        ));
    }

    #[test]
    fn seeded_chains_satisfy_power_bounds_and_sandwich() {
        let mut rng = sampling::rng_from_seed(51);
        for trial in 0..20 {
            let n = 3 + (trial % 6);
            let t = sampling::random_column_stochastic(&mut rng, n);
            let mut model = validate_stochastic(t.clone()).unwrap();
            let projection = stationary_projection(&mut model).unwrap();

            let power_t = linalg::power_sup_norm(&t, NormKind::OneToOne, 100).unwrap();
            assert_relative_eq!(power_t, 1.0, max_relative = 1e-12);
            let power_sub =
                linalg::power_sup_norm(&t.sub(&projection), NormKind::OneToOne, 100).unwrap();
            assert!(power_sub <= 2.0 + 1e-12, "power bound {power_sub}");

            // Tinf is idempotent and column-stochastic.
            assert!(projection.mul(&projection).sub(&projection).max_abs() <= 1e-8);
            for col in 0..n {
                let sum: f64 = (0..n).map(|row| projection[(row, col)].re).sum();
                assert!((sum - 1.0).abs() <= 1e-8);
                for row in 0..n {
                    assert!(projection[(row, col)].re >= -1e-12);
                }
            }

            let kappa = kappa_cl_exact(&mut model).unwrap();
            let bounds = kappa_cl_bounds(&mut model).unwrap();
            assert!(
                bounds.lower <= kappa * (1.0 + 1e-8),
                "trial {trial}: lower {} vs kappa {kappa}",
                bounds.lower
            );
            assert!(
                kappa <= bounds.upper_cited.min(bounds.upper_new) * (1.0 + 1e-8),
                "trial {trial}: kappa {kappa} vs uppers {} / {}",
                bounds.upper_cited,
                bounds.upper_new
            );
        }
    }

    #[test]
    fn vertex_scan_dominates_random_zero_sum_directions() {
        let mut rng = sampling::rng_from_seed(52);
        for _ in 0..5 {
            let n = 4 + rng.random_range(0..3);
            let t = sampling::random_column_stochastic(&mut rng, n);
            let mut model = validate_stochastic(t).unwrap();
            let z = fundamental_inverse(&mut model).unwrap();
            let kappa = kappa_cl_exact(&mut model).unwrap();
            for _ in 0..200 {
                let mut delta: Vec<f64> = (0..n).map(|_| {
                    let x: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
                    x
                }).collect();
                let mean: f64 = delta.iter().sum::<f64>() / n as f64;
                for d in delta.iter_mut() {
                    *d -= mean;
                }
                let l1: f64 = delta.iter().map(|d| d.abs()).sum();
                if l1 < 1e-9 {
                    continue;
                }
                let image = z.mul_vec(
                    &delta
                        .iter()
                        .map(|&d| Complex64::new(d / l1, 0.0))
                        .collect::<Vec<_>>(),
                );
                let value: f64 = image.iter().map(|zv| zv.norm()).sum();
                assert!(
                    value <= kappa + 1e-10,
                    "sampled direction beat the vertex scan: {value} > {kappa}"
                );
            }
        }
    }

    #[test]
    fn depolarizing_channel_bounds() {
        let q = completely_depolarizing(2).unwrap();
        let eigenvalues = linalg::eigenvalues_dense(q.superoperator()).unwrap();
        let mut moduli: Vec<f64> = eigenvalues.iter().map(|l| l.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!((moduli[3] - 1.0).abs() < 1e-12);
        assert!(moduli[2] < 1e-12);

        let bounds = kappa_qu_bounds(&q).unwrap();
        assert_relative_eq!(bounds.lower, 1.0, max_relative = 1e-9);
        assert_relative_eq!(
            bounds.upper,
            8.0 * (16.0 * E - 4.0).sqrt(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn phase_gate_channel_is_degenerate() {
        let u = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::ONE,
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::new(0.0, 1.0),
            ],
        )
        .unwrap();
        let q = unitary_conjugation(&u).unwrap();
        assert!(matches!(
            kappa_qu_bounds(&q),
            Err(Error::NonUniqueStationary)
        ));
        assert!(matches!(
            kappa_qu_monte_carlo_lower(&q, 10, 1),
            Err(Error::NonUniqueStationary)
        ));
    }

    #[test]
    fn superoperator_admission_checks() {
        assert!(QuantumChannelModel::new(ComplexMatrix::identity(3)).is_err());
        let shrunk = completely_depolarizing(2)
            .unwrap()
            .superoperator()
            .scale(Complex64::new(0.9, 0.0));
        assert!(matches!(
            QuantumChannelModel::new(shrunk),
            Err(Error::NotTracePreserving { defect }) if defect > 0.05
        ));
    }

    /// Mixed unitary qubit channel with a genuine spectral gap, used by the
    /// Monte-Carlo tests.
    fn mixed_unitary_channel(seed: u64) -> QuantumChannelModel {
        let mut rng = sampling::rng_from_seed(seed);
        let u = sampling::random_unitary(&mut rng, 2);
        let v = sampling::random_unitary(&mut rng, 2);
        let su = unitary_conjugation(&u).unwrap();
        let sv = unitary_conjugation(&v).unwrap();
        let sd = completely_depolarizing(2).unwrap();
        let mixed = su
            .superoperator()
            .scale(Complex64::new(0.45, 0.0))
            .add(&sv.superoperator().scale(Complex64::new(0.25, 0.0)))
            .add(&sd.superoperator().scale(Complex64::new(0.3, 0.0)));
        QuantumChannelModel::new(mixed).unwrap()
    }

    #[test]
    fn monte_carlo_witness_brackets() {
        let q = mixed_unitary_channel(53);
        let bounds = kappa_qu_bounds(&q).unwrap();
        assert!(bounds.lower >= 1.0 - 1e-12);
        assert!(bounds.upper >= bounds.lower);

        assert_eq!(kappa_qu_monte_carlo_lower(&q, 0, 7).unwrap(), 0.0);

        // Statistical invariant: with 10^3 samples the witness reaches the
        // spectral lower bound (minus 1e-8) in at least 90% of seeded runs.
        let mut successes = 0;
        for seed in 0..10u64 {
            let estimate = kappa_qu_monte_carlo_lower(&q, 1000, seed).unwrap();
            assert!(
                estimate <= bounds.upper * (1.0 + 1e-8),
                "estimate {estimate} above the upper bound {}",
                bounds.upper
            );
            if estimate >= bounds.lower - 1e-8 {
                successes += 1;
            }
        }
        assert!(successes >= 9, "only {successes}/10 runs reached the lower bound");

        // Determinism: same seed, same estimate.
        let a = kappa_qu_monte_carlo_lower(&q, 256, 99).unwrap();
        let b = kappa_qu_monte_carlo_lower(&q, 256, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn depolarizing_witness_stays_below_upper() {
        let q = completely_depolarizing(2).unwrap();
        let bounds = kappa_qu_bounds(&q).unwrap();
        let estimate = kappa_qu_monte_carlo_lower(&q, 500, 3).unwrap();
        assert!(estimate <= bounds.upper + 1e-9);
        // For the depolarizing channel Z acts as the identity on traceless
        // matrices, so the witness saturates the lower bound exactly.
        assert_relative_eq!(estimate, 1.0, max_relative = 1e-9);
    }
}

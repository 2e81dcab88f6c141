//! Blaschke products, their window identities, and the H2-norm machinery for
//! the smoothed interpolant behind the power-bounded resolvent bound.
//!
//! Index convention: the named operations address spectrum points with
//! one-based indices `1..=degree`, matching the labelling `l_1..l_m` used in
//! the mathematical statements; error payloads report positions the same way.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Strict-interior margin: spectrum points must satisfy |l| <= 1 - DISK_MARGIN.
pub const DISK_MARGIN: f64 = 1e-9;

/// Minimum pairwise node gap required by identity-check and oracle operations
/// whose intermediate expressions divide by node differences.
pub const NODE_GAP: f64 = 1e-6;

/// Minimum distance from zeta to the spectrum when building a [`SmoothedInterpolant`].
pub const ZETA_MARGIN: f64 = 1e-10;

/// Minimum |zeta - l_i| for the combinatorial identity evaluations.
const IDENTITY_ZETA_GAP: f64 = 1e-6;

/// Floor for |1 - conj(l) z| before an evaluation reports a reflected-pole hit.
const REFLECTED_POLE_TOL: f64 = 1e-14;

/// Part-2 closed forms divide by 1 - r^2 |zeta|^2; reject anything closer.
const SZEGO_DENOM_TOL: f64 = 1e-12;

/// Width of the band around r|zeta| = 1 inside which the H2 closed form
/// cancels catastrophically and the difference-quotient continuation is used.
const H2_CONTINUATION_BAND: f64 = 1e-7;

/// Step for the symmetric difference quotient continuing the H2 norm across
/// r|zeta| = 1.
const H2_CONTINUATION_STEP: f64 = 1e-6;

/// An ordered sequence of eigenvalues strictly inside the unit disk.
///
/// The sequence keeps multiplicity and order; operations that need pairwise
/// distinct nodes enforce the [`NODE_GAP`] separation themselves.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    points: Vec<Complex64>,
}

impl Spectrum {
    /// Validates that every point is finite and satisfies |l| <= 1 - 1e-9.
    ///
    /// Boundary eigenvalues are rejected rather than silently accepted: every
    /// formula downstream divides by quantities like 1 - |l|^2, and the error
    /// advises nudging such eigenvalues radially inward instead.
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        for (idx, p) in points.iter().enumerate() {
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::NonFinite);
            }
            let modulus = p.norm();
            if modulus > 1.0 - DISK_MARGIN {
                return Err(Error::OutsideDisk { index: idx + 1, modulus });
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Number of points, counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.points.len()
    }

    /// Distance from `z` to the nearest spectrum point.
    pub fn min_distance_to(&self, z: Complex64) -> f64 {
        self.points
            .iter()
            .map(|p| (z - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest pairwise gap (infinite for a single point).
    pub fn min_node_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                gap = gap.min((self.points[i] - self.points[j]).norm());
            }
        }
        gap
    }

    /// Errors with the offending (one-based) pair when two nodes sit closer
    /// than [`NODE_GAP`].
    pub(crate) fn require_node_gap(&self) -> Result<()> {
        require_gap_within(&self.points, 0)
    }
}

fn require_gap_within(points: &[Complex64], offset: usize) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if (points[i] - points[j]).norm() < NODE_GAP {
                return Err(Error::CoincidentNodes { i: offset + i + 1, j: offset + j + 1 });
            }
        }
    }
    Ok(())
}

fn require_zeta_gap(points: &[Complex64], zeta: Complex64) -> Result<()> {
    let dist = points
        .iter()
        .map(|p| (zeta - p).norm())
        .fold(f64::INFINITY, f64::min);
    if dist < IDENTITY_ZETA_GAP {
        return Err(Error::ZetaOnSpectrum { distance: dist });
    }
    Ok(())
}

/// Slice of the one-based inclusive window `[j, i]`, with bounds checks.
fn window(spectrum: &Spectrum, j: usize, i: usize) -> Result<&[Complex64]> {
    let m = spectrum.degree();
    if j < 1 || j > m {
        return Err(Error::IndexRange { what: "j", got: j, limit: m });
    }
    if i < 1 || i > m {
        return Err(Error::IndexRange { what: "i", got: i, limit: m });
    }
    if j > i {
        return Err(Error::invalid("window", format!("need j <= i, got j={j} > i={i}")));
    }
    Ok(&spectrum.points()[j - 1..=i - 1])
}

/// Evaluate B(z) = prod_i (z - l_i)/(1 - conj(l_i) z).
///
/// For z in the closed unit disk the denominators stay away from zero because
/// every node is strictly interior; far outside the disk z can collide with a
/// reflected pole 1/conj(l_i), which is reported as an error.
pub fn blaschke_eval(spectrum: &Spectrum, z: Complex64) -> Result<Complex64> {
    let mut product = Complex64::ONE;
    for (idx, &l) in spectrum.points().iter().enumerate() {
        let denom = Complex64::ONE - l.conj() * z;
        if denom.norm() <= REFLECTED_POLE_TOL {
            return Err(Error::AtReflectedPole { index: idx + 1 });
        }
        product *= (z - l) / denom;
    }
    Ok(product)
}

/// Evaluate the truncated product prod_{u=j}^{i} (z - l_u)/(1 - conj(l_u) z)
/// over the one-based inclusive window `[j, i]`.
pub fn blaschke_truncated_eval(
    spectrum: &Spectrum,
    j: usize,
    i: usize,
    z: Complex64,
) -> Result<Complex64> {
    let w = window(spectrum, j, i)?;
    let mut product = Complex64::ONE;
    for (offset, &l) in w.iter().enumerate() {
        let denom = Complex64::ONE - l.conj() * z;
        if denom.norm() <= REFLECTED_POLE_TOL {
            return Err(Error::AtReflectedPole { index: j + offset });
        }
        product *= (z - l) / denom;
    }
    Ok(product)
}

/// Both sides of the two-endpoint partial-fraction identity on the window
/// `[j, i]` (one-based, j < i):
///
/// lhs = sum_{u=j}^{i} 1/(zeta - l_u)
///         * prod_{v != i, v != j} (1 - conj(l_v) l_u)
///         / prod_{v != u} (l_u - l_v),
///
/// rhs = 1/((1 - conj(l_i) zeta)(1 - conj(l_j) zeta))
///         * prod_{u=j}^{i} (1 - conj(l_u) zeta)/(zeta - l_u),
///
/// with all product indices running over the window. The rhs prefactor
/// cancels the two endpoint numerator factors exactly, so it is evaluated in
/// the cancelled form
///
/// rhs = prod_{u interior} (1 - conj(l_u) zeta)/(zeta - l_u)
///         * 1/((zeta - l_j)(zeta - l_i)),
///
/// which stays finite even when zeta hits a reflected endpoint pole
/// 1/conj(l_j) or 1/conj(l_i).
pub fn combi1_sides(
    spectrum: &Spectrum,
    zeta: Complex64,
    j: usize,
    i: usize,
) -> Result<(Complex64, Complex64)> {
    let w = window(spectrum, j, i)?;
    if w.len() < 2 {
        return Err(Error::invalid(
            "window",
            format!("the two-endpoint identity needs j < i, got j = i = {j}"),
        ));
    }
    require_gap_within(w, j - 1)?;
    require_zeta_gap(w, zeta)?;

    let last = w.len() - 1;
    let mut lhs = Complex64::ZERO;
    for (u, &lu) in w.iter().enumerate() {
        let mut term = Complex64::ONE / (zeta - lu);
        for (v, &lv) in w.iter().enumerate() {
            if v != 0 && v != last {
                term *= Complex64::ONE - lv.conj() * lu;
            }
            if v != u {
                term /= lu - lv;
            }
        }
        lhs += term;
    }

    let mut rhs = Complex64::ONE / ((zeta - w[0]) * (zeta - w[last]));
    for (u, &lu) in w.iter().enumerate() {
        if u != 0 && u != last {
            rhs *= (Complex64::ONE - lu.conj() * zeta) / (zeta - lu);
        }
    }
    Ok((lhs, rhs))
}

/// Which display of the residue identity [`combi2_sides`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combi2Part {
    /// First display: the numerator product omits the factor indexed by `l`
    /// (one-based), and the closed form is pinned at that node.
    One { l: usize },
    /// Second display: every summand carries the extra kernel
    /// 1/(1 - r^2 conj(zeta) l_i).
    Two,
}

/// Both sides of the smoothed residue identities.
///
/// Part 1:
///
/// lhs = sum_i 1/(zeta - l_i)
///         * prod_{j != l} (1 - r^2 conj(l_j) l_i) / prod_{j != i} (r l_i - r l_j),
///
/// rhs = r/(1 - r^2 conj(l_l) zeta) * prod_i (1 - r^2 conj(l_i) zeta)/(r zeta - r l_i).
///
/// Part 2:
///
/// lhs = sum_i 1/(zeta - l_i) * 1/(1 - r^2 conj(zeta) l_i)
///         * prod_j (1 - r^2 conj(l_j) l_i) / prod_{j != i} (r l_i - r l_j),
///
/// rhs = r/(1 - r^2 |zeta|^2)
///         * ( prod_i (1 - r^2 conj(l_i) zeta)/(r zeta - r l_i)
///           - prod_i (r conj(zeta) - r conj(l_i))/(1 - r^2 l_i conj(zeta)) ).
pub fn combi2_sides(
    spectrum: &Spectrum,
    zeta: Complex64,
    r: f64,
    part: Combi2Part,
) -> Result<(Complex64, Complex64)> {
    if !r.is_finite() || r <= 0.0 || r >= 1.0 {
        return Err(Error::invalid("r", format!("need r strictly in (0, 1), got {r}")));
    }
    spectrum.require_node_gap()?;
    require_zeta_gap(spectrum.points(), zeta)?;
    let points = spectrum.points();
    let m = points.len();
    let rr = r * r;

    let pinned = match part {
        Combi2Part::One { l } => {
            if l < 1 || l > m {
                return Err(Error::IndexRange { what: "l", got: l, limit: m });
            }
            Some(l - 1)
        }
        Combi2Part::Two => {
            let denom = 1.0 - rr * zeta.norm_sqr();
            if denom.abs() < SZEGO_DENOM_TOL {
                return Err(Error::invalid(
                    "zeta",
                    format!(
                        "|1 - r^2 |zeta|^2| = {:.3e} is below {SZEGO_DENOM_TOL:e}; \
                         the part-2 closed form divides by it",
                        denom.abs()
                    ),
                ));
            }
            None
        }
    };

    let mut lhs = Complex64::ZERO;
    for (i, &li) in points.iter().enumerate() {
        let mut term = Complex64::ONE / (zeta - li);
        if pinned.is_none() {
            let kernel = Complex64::ONE - rr * zeta.conj() * li;
            if kernel.norm() <= REFLECTED_POLE_TOL {
                return Err(Error::AtReflectedPole { index: i + 1 });
            }
            term /= kernel;
        }
        for (j, &lj) in points.iter().enumerate() {
            if pinned != Some(j) {
                term *= Complex64::ONE - rr * lj.conj() * li;
            }
            if j != i {
                term /= r * (li - lj);
            }
        }
        lhs += term;
    }

    let forward: Complex64 = points
        .iter()
        .map(|&li| (Complex64::ONE - rr * li.conj() * zeta) / (r * (zeta - li)))
        .product();
    let rhs = match pinned {
        Some(l) => {
            let anchor = Complex64::ONE - rr * points[l].conj() * zeta;
            if anchor.norm() <= REFLECTED_POLE_TOL {
                return Err(Error::AtReflectedPole { index: l + 1 });
            }
            forward * r / anchor
        }
        None => {
            let backward: Complex64 = points
                .iter()
                .map(|&li| {
                    r * (zeta.conj() - li.conj()) / (Complex64::ONE - rr * li * zeta.conj())
                })
                .product();
            (forward - backward) * r / (1.0 - rr * zeta.norm_sqr())
        }
    };
    Ok((lhs, rhs))
}

/// The data (spectrum, zeta, r) defining the smoothed interpolant
///
/// g~(z) = sum_k c_k B~(z)/(z - r l_k),
/// c_k = 1/(zeta - l_k)
///         * prod_j (1 - r^2 conj(l_j) l_k) / prod_{j != k} (r l_k - r l_j),
///
/// where B~ is the Blaschke product of the spectrum contracted by r. The
/// smoothed function z -> g~(rz) takes the value 1/(zeta - l_i) at every node
/// l_i, and its Wiener norm is at most sqrt(1/(1 - r^2)) times the H2 norm
/// computed here — the chain that powers the power-bounded resolvent bound.
#[derive(Clone, Debug)]
pub struct SmoothedInterpolant {
    spectrum: Spectrum,
    zeta: Complex64,
    r: f64,
}

impl SmoothedInterpolant {
    pub fn new(spectrum: Spectrum, zeta: Complex64, r: f64) -> Result<Self> {
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::invalid("zeta", "must be finite"));
        }
        if !r.is_finite() || r <= 0.0 || r >= 1.0 {
            return Err(Error::invalid("r", format!("need r strictly in (0, 1), got {r}")));
        }
        let distance = spectrum.min_distance_to(zeta);
        if distance <= ZETA_MARGIN {
            return Err(Error::ZetaOnSpectrum { distance });
        }
        Ok(Self { spectrum, zeta, r })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// H2 norm of g~ from the closed form
    ///
    /// ||g~||^2 = r^2/(1 - r^2 |zeta|^2)
    ///              * (prod_i |(1 - r^2 conj(l_i) zeta)/(r zeta - r l_i)|^2 - 1).
    ///
    /// Numerator and denominator both vanish linearly at r|zeta| = 1 (on
    /// |w| = 1 each Blaschke-type factor has modulus one), so inside a narrow
    /// band around that circle the value is continued by a symmetric
    /// difference quotient in r — the case the closed form only defines by
    /// continuity.
    pub fn gtilde_h2_norm(&self) -> f64 {
        let scaled = self.r * self.zeta.norm();
        let square = if (scaled - 1.0).abs() < H2_CONTINUATION_BAND {
            let h = H2_CONTINUATION_STEP;
            let dn = self.h2_numerator(self.r + h) - self.h2_numerator(self.r - h);
            let dd = self.h2_denominator(self.r + h) - self.h2_denominator(self.r - h);
            dn / dd
        } else {
            self.h2_numerator(self.r) / self.h2_denominator(self.r)
        };
        square.max(0.0).sqrt()
    }

    fn h2_numerator(&self, rho: f64) -> f64 {
        let mut product = 1.0;
        for &l in self.spectrum.points() {
            let num = Complex64::ONE - l.conj() * self.zeta * (rho * rho);
            let den = (self.zeta - l) * rho;
            product *= num.norm_sqr() / den.norm_sqr();
        }
        rho * rho * (product - 1.0)
    }

    fn h2_denominator(&self, rho: f64) -> f64 {
        1.0 - rho * rho * self.zeta.norm_sqr()
    }

    /// Taylor coefficients of g~ about 0 through `max_degree` (inclusive).
    ///
    /// Each summand c_k B~(z)/(z - r l_k) is expanded by convolving the
    /// series of the Blaschke factors with the geometric kernel series: the
    /// k-th factor's numerator (z - r l_k) cancels the pole, so the summand
    /// is the product of the other factors and the geometric series of
    /// 1/(1 - r conj(l_k) z), all of whose coefficients stay bounded.
    /// Multiplication by (z - a) and division by (1 - conj(a) z) are both
    /// linear-time recurrences, and truncation is exact: coefficients up to
    /// `max_degree` never depend on dropped ones.
    pub fn gtilde_taylor_coefficients(&self, max_degree: usize) -> Result<Vec<Complex64>> {
        self.spectrum.require_node_gap()?;
        let points = self.spectrum.points();
        let m = points.len();
        let rr = self.r * self.r;
        let mut total = vec![Complex64::ZERO; max_degree + 1];
        let mut series = vec![Complex64::ZERO; max_degree + 1];
        for k in 0..m {
            let mut ck = Complex64::ONE / (self.zeta - points[k]);
            for j in 0..m {
                ck *= Complex64::ONE - rr * points[j].conj() * points[k];
                if j != k {
                    ck /= self.r * (points[k] - points[j]);
                }
            }
            series.fill(Complex64::ZERO);
            series[0] = Complex64::ONE;
            for (i, &li) in points.iter().enumerate() {
                if i != k {
                    mul_by_linear(&mut series, self.r * li);
                }
            }
            for &li in points {
                div_by_kernel(&mut series, self.r * li.conj());
            }
            for (t, s) in total.iter_mut().zip(series.iter()) {
                *t += ck * s;
            }
        }
        Ok(total)
    }

    /// Independent check of [`Self::gtilde_h2_norm`] through the Plancherel
    /// identity: sqrt(sum_{d <= max_degree} |ghat(d)|^2) over the Taylor
    /// coefficients of g~.
    ///
    /// The truncation only ever underestimates, by at most the geometric
    /// tail: |ghat(d)| decays like q^d with q = max_i r |l_i| < r, because
    /// the poles of g~ sit at the reflected points 1/(r conj(l_i)). The
    /// required `max_degree >= 100` keeps that tail negligible for every
    /// spectrum the crate accepts in its identity tests.
    pub fn gtilde_taylor_h2_oracle(&self, max_degree: usize) -> Result<f64> {
        if max_degree < 100 {
            return Err(Error::invalid(
                "max_degree",
                format!("the Taylor oracle needs max_degree >= 100, got {max_degree}"),
            ));
        }
        let coefficients = self.gtilde_taylor_coefficients(max_degree)?;
        Ok(coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
    }
}

/// Multiply a truncated Taylor series by (z - a) in place.
fn mul_by_linear(series: &mut [Complex64], a: Complex64) {
    for d in (0..series.len()).rev() {
        let shifted = if d == 0 { Complex64::ZERO } else { series[d - 1] };
        series[d] = shifted - a * series[d];
    }
}

/// Divide a truncated Taylor series by (1 - conj(a) z) in place, i.e.
/// convolve with the geometric series of the kernel: q_d = p_d + conj(a) q_{d-1}.
fn div_by_kernel(series: &mut [Complex64], a_conj: Complex64) {
    for d in 1..series.len() {
        let prev = series[d - 1];
        series[d] += a_conj * prev;
    }
}

/// Horner evaluation of a truncated Taylor series at `z`.
pub fn evaluate_series(coefficients: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for &c in coefficients.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spectrum(points: &[Complex64]) -> Spectrum {
        Spectrum::new(points.to_vec()).unwrap()
    }

    fn relative_gap(lhs: Complex64, rhs: Complex64) -> f64 {
        (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn spectrum_rejects_empty_boundary_and_nonfinite() {
        assert!(matches!(Spectrum::new(vec![]), Err(Error::EmptySpectrum)));
        let err = Spectrum::new(vec![c(0.3, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::OutsideDisk { index: 2, .. }));
        assert!(matches!(
            Spectrum::new(vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
        // The margin itself is admissible.
        assert!(Spectrum::new(vec![c(1.0 - 1e-9, 0.0)]).is_ok());
    }

    #[test]
    fn blaschke_single_factor_values() {
        let s = spectrum(&[c(0.0, 0.0)]);
        assert_eq!(blaschke_eval(&s, c(0.5, 0.0)).unwrap(), c(0.5, 0.0));

        let node = c(0.3, -0.4);
        let s = spectrum(&[node]);
        assert_eq!(blaschke_eval(&s, node).unwrap(), Complex64::ZERO);

        let s = spectrum(&[c(0.5, 0.0)]);
        let b = blaschke_eval(&s, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(b.re, 1.0, max_relative = 1e-15);
        assert_abs_diff_eq!(b.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn blaschke_is_unimodular_on_the_unit_circle() {
        let s = spectrum(&[c(0.3, 0.4), c(-0.2, 0.1), c(0.7, 0.0), c(0.0, -0.5)]);
        for t in 0..64 {
            let theta = std::f64::consts::TAU * t as f64 / 64.0;
            let z = Complex64::from_polar(1.0, theta);
            let b = blaschke_eval(&s, z).unwrap();
            assert!((b.norm() - 1.0).abs() <= 1e-12, "defect {:e}", (b.norm() - 1.0).abs());
        }
    }

    #[test]
    fn blaschke_contracts_the_open_disk() {
        let mut rng = sampling::rng_from_seed(17);
        let s = sampling::random_spectrum(&mut rng, 5, 0.85, 0.05);
        for _ in 0..50 {
            let z = sampling::uniform_disk(&mut rng, 0.99);
            let b = blaschke_eval(&s, z).unwrap();
            assert!(b.norm() < 1.0, "|B({z})| = {}", b.norm());
        }
    }

    #[test]
    fn blaschke_eval_is_permutation_invariant() {
        let pts = [c(0.3, 0.4), c(-0.2, 0.1), c(0.7, 0.0), c(0.0, -0.5), c(0.1, 0.1)];
        let mut reversed = pts;
        reversed.reverse();
        let mut rotated = pts;
        rotated.rotate_left(2);
        let (a, b, d) = (spectrum(&pts), spectrum(&reversed), spectrum(&rotated));
        for z in [c(0.2, -0.3), c(0.9, 0.1), c(-0.55, 0.21), c(0.0, 0.977)] {
            let va = blaschke_eval(&a, z).unwrap();
            let vb = blaschke_eval(&b, z).unwrap();
            let vd = blaschke_eval(&d, z).unwrap();
            assert!((va - vb).norm() <= 1e-13 * va.norm().max(1.0));
            assert!((va - vd).norm() <= 1e-13 * va.norm().max(1.0));
        }
    }

    #[test]
    fn truncated_product_windows() {
        let s = spectrum(&[c(0.2, 0.0), c(0.4, 0.0), c(0.6, 0.0)]);
        // Hand value: factors at z = 0 are just (-l_u), so the [2,3] window
        // gives (-0.4)(-0.6) = 0.24.
        let w = blaschke_truncated_eval(&s, 2, 3, Complex64::ZERO).unwrap();
        assert_relative_eq!(w.re, 0.24, max_relative = 1e-15);
        assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-15);

        let z = c(0.3, 0.5);
        let full = blaschke_truncated_eval(&s, 1, 3, z).unwrap();
        let direct = blaschke_eval(&s, z).unwrap();
        assert!((full - direct).norm() <= 1e-15);

        let single = blaschke_truncated_eval(&s, 2, 2, z).unwrap();
        let expected = (z - c(0.4, 0.0)) / (Complex64::ONE - c(0.4, 0.0) * z);
        assert!((single - expected).norm() <= 1e-15);

        assert!(matches!(
            blaschke_truncated_eval(&s, 0, 2, z),
            Err(Error::IndexRange { what: "j", .. })
        ));
        assert!(matches!(
            blaschke_truncated_eval(&s, 1, 4, z),
            Err(Error::IndexRange { what: "i", .. })
        ));
        assert!(matches!(
            blaschke_truncated_eval(&s, 3, 2, z),
            Err(Error::InvalidParameter { name: "window", .. })
        ));
    }

    #[test]
    fn combi1_hand_window_even_at_a_reflected_endpoint_pole() {
        // zeta = 2 is the reflected pole of the endpoint node 0.5; the
        // cancelled right-hand side stays finite and both sides equal
        // 1/((2-0)(2-0.5)) = 1/3.
        let s = spectrum(&[c(0.0, 0.0), c(0.5, 0.0)]);
        let (lhs, rhs) = combi1_sides(&s, c(2.0, 0.0), 1, 2).unwrap();
        assert!(relative_gap(lhs, rhs) <= 1e-12);
        assert_relative_eq!(rhs.re, 1.0 / 3.0, max_relative = 1e-14);
        assert_abs_diff_eq!(rhs.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn combi1_agrees_over_seeded_random_windows() {
        let mut rng = sampling::rng_from_seed(71);
        for _ in 0..100 {
            let m = rng.random_range(2..=8);
            let s = sampling::random_spectrum(&mut rng, m, 0.9, 0.15);
            let zeta = sampling::unit_circle_point(&mut rng);
            let j = rng.random_range(1..m);
            let i = rng.random_range(j + 1..=m);
            let (lhs, rhs) = combi1_sides(&s, zeta, j, i).unwrap();
            let gap = relative_gap(lhs, rhs);
            assert!(gap <= 1e-10, "relative gap {gap:e} on window [{j},{i}] of degree {m}");
        }
    }

    #[test]
    fn combi1_polynomial_form_matches_at_a_node() {
        // Multiplying both sides by prod (zeta - l_u) gives polynomials in
        // zeta; at zeta = l_a both reduce to prod_{v != endpoints} (1 - conj(l_v) l_a).
        let pts = [c(0.1, 0.2), c(-0.3, 0.15), c(0.45, -0.1), c(-0.05, -0.55)];
        let alpha = 1; // zero-based position of l_2
        let la = pts[alpha];
        let last = pts.len() - 1;

        let expected: Complex64 = pts
            .iter()
            .enumerate()
            .filter(|(v, _)| *v != 0 && *v != last)
            .map(|(_, lv)| Complex64::ONE - lv.conj() * la)
            .product();

        // Left polynomial: sum_u N_u/D_u * prod_{v != u} (l_a - l_v); every
        // u != alpha contributes an exact zero factor.
        let mut lhs_poly = Complex64::ZERO;
        for (u, &lu) in pts.iter().enumerate() {
            let mut term = Complex64::ONE;
            for (v, &lv) in pts.iter().enumerate() {
                if v != 0 && v != last {
                    term *= Complex64::ONE - lv.conj() * lu;
                }
                if v != u {
                    term *= la - lv;
                    term /= lu - lv;
                }
            }
            lhs_poly += term;
        }
        assert!((lhs_poly - expected).norm() <= 1e-12 * expected.norm());

        // Right polynomial in the cancelled form: the interior numerator
        // factors evaluated at l_a.
        let rhs_poly: Complex64 = pts
            .iter()
            .enumerate()
            .filter(|(v, _)| *v != 0 && *v != last)
            .map(|(_, lv)| Complex64::ONE - lv.conj() * la)
            .product();
        assert!((rhs_poly - expected).norm() <= 1e-15);
    }

    #[test]
    fn combi1_rejects_bad_windows_and_near_nodes() {
        let s = spectrum(&[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 1e-8)]);
        assert!(matches!(
            combi1_sides(&s, c(2.0, 0.0), 2, 2),
            Err(Error::InvalidParameter { name: "window", .. })
        ));
        assert!(matches!(
            combi1_sides(&s, c(2.0, 0.0), 2, 3),
            Err(Error::CoincidentNodes { i: 2, j: 3 })
        ));
        assert!(matches!(
            combi1_sides(&s, c(0.5, 1e-8), 1, 2),
            Err(Error::ZetaOnSpectrum { .. })
        ));
    }

    #[test]
    fn combi2_single_node_reduces_to_the_cauchy_kernel() {
        let s = spectrum(&[c(0.3, 0.0)]);
        let zeta = c(1.7, 0.0);
        let (lhs, rhs) = combi2_sides(&s, zeta, 0.7, Combi2Part::One { l: 1 }).unwrap();
        assert!(relative_gap(lhs, rhs) <= 1e-14);
        assert_relative_eq!(lhs.re, 1.0 / 1.4, max_relative = 1e-14);
        assert_abs_diff_eq!(lhs.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn combi2_part_two_fixed_instance() {
        let s = spectrum(&[c(0.3, 0.0), c(-0.5, 0.0)]);
        let (lhs, rhs) = combi2_sides(&s, c(1.0, 0.0), 0.9, Combi2Part::Two).unwrap();
        assert!(relative_gap(lhs, rhs) <= 1e-10, "gap {:e}", relative_gap(lhs, rhs));
    }

    #[test]
    fn combi2_agrees_over_seeded_random_instances() {
        let mut rng = sampling::rng_from_seed(72);
        for _ in 0..100 {
            let m = rng.random_range(1..=8);
            let s = sampling::random_spectrum(&mut rng, m, 0.9, 0.15);
            let zeta = sampling::unit_circle_point(&mut rng);
            let r = rng.random_range(0.5..0.99);
            let l = rng.random_range(1..=m);
            let (lhs, rhs) = combi2_sides(&s, zeta, r, Combi2Part::One { l }).unwrap();
            let gap = relative_gap(lhs, rhs);
            assert!(gap <= 1e-10, "part 1 gap {gap:e} at degree {m}, r {r}");
            let (lhs, rhs) = combi2_sides(&s, zeta, r, Combi2Part::Two).unwrap();
            let gap = relative_gap(lhs, rhs);
            assert!(gap <= 1e-10, "part 2 gap {gap:e} at degree {m}, r {r}");
        }
    }

    #[test]
    fn combi2_rejects_bad_parameters() {
        let s = spectrum(&[c(0.1, 0.0)]);
        let zeta = c(1.5, 0.0);
        assert!(matches!(
            combi2_sides(&s, zeta, 1.0, Combi2Part::Two),
            Err(Error::InvalidParameter { name: "r", .. })
        ));
        assert!(matches!(
            combi2_sides(&s, zeta, 0.7, Combi2Part::One { l: 2 }),
            Err(Error::IndexRange { what: "l", .. })
        ));
        // r^2 |zeta|^2 = 1 exactly: part 2's prefactor denominator vanishes.
        assert!(matches!(
            combi2_sides(&s, c(2.0, 0.0), 0.5, Combi2Part::Two),
            Err(Error::InvalidParameter { name: "zeta", .. })
        ));
    }

    #[test]
    fn h2_norm_hand_value_is_exactly_one() {
        // S = {0}, zeta = 1, r = 0.8: the squared norm is
        // (0.64/0.36) * (1/0.64 - 1) = 1.
        let g = SmoothedInterpolant::new(spectrum(&[c(0.0, 0.0)]), c(1.0, 0.0), 0.8).unwrap();
        assert_relative_eq!(g.gtilde_h2_norm(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn h2_norm_square_is_nonnegative_inside_and_outside_the_disk() {
        let mut rng = sampling::rng_from_seed(73);
        for _ in 0..50 {
            let m = rng.random_range(1..=6);
            let s = sampling::random_spectrum(&mut rng, m, 0.9, 0.05);
            let zeta = if rng.random::<bool>() {
                sampling::unit_circle_point(&mut rng)
            } else {
                sampling::annulus_point(&mut rng, 1.1, 2.0)
            };
            let r = rng.random_range(0.3..0.99);
            if s.min_distance_to(zeta) <= 1e-3 {
                continue;
            }
            let g = SmoothedInterpolant::new(s, zeta, r).unwrap();
            let norm = g.gtilde_h2_norm();
            assert!(norm.is_finite() && norm >= 0.0, "norm {norm}");
        }
    }

    #[test]
    fn h2_norm_continuation_matches_hand_value_on_the_band() {
        // S = {0.2}, zeta = 2, r = 0.5 sits exactly on r|zeta| = 1. Here
        // g~(z) = (0.99/1.8)/(1 - 0.1 z), whose squared H2 norm is
        // (0.99/1.8)^2 / (1 - 0.01) = 0.3025/0.99.
        let expected = (0.3025f64 / 0.99).sqrt();
        let g = SmoothedInterpolant::new(spectrum(&[c(0.2, 0.0)]), c(2.0, 0.0), 0.5).unwrap();
        let continued = g.gtilde_h2_norm();
        assert_relative_eq!(continued, expected, max_relative = 1e-9);

        let oracle = g.gtilde_taylor_h2_oracle(600).unwrap();
        assert_relative_eq!(oracle, expected, max_relative = 1e-13);

        // Just off the band the direct closed form takes over and agrees.
        for r in [0.5 - 1e-5, 0.5 + 1e-5] {
            let near = SmoothedInterpolant::new(spectrum(&[c(0.2, 0.0)]), c(2.0, 0.0), r)
                .unwrap()
                .gtilde_h2_norm();
            assert_abs_diff_eq!(near, expected, epsilon = 1e-3);
        }
    }

    #[test]
    fn taylor_oracle_reproduces_the_constant_interpolant() {
        // S = {0}: g~ collapses to the constant 1/zeta * (1 - 0) ... = 1, so
        // the truncated Plancherel sum is exactly 1 at any degree.
        let g = SmoothedInterpolant::new(spectrum(&[c(0.0, 0.0)]), c(1.0, 0.0), 0.8).unwrap();
        let oracle = g.gtilde_taylor_h2_oracle(2000).unwrap();
        assert_abs_diff_eq!(oracle, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn closed_form_matches_taylor_oracle_over_seeded_instances() {
        let mut rng = sampling::rng_from_seed(74);
        for _ in 0..25 {
            let m = rng.random_range(1..=5);
            let s = sampling::random_spectrum(&mut rng, m, 0.9, 0.1);
            let zeta = sampling::unit_circle_point(&mut rng);
            if s.min_distance_to(zeta) <= 1e-2 {
                continue;
            }
            let r = rng.random_range(0.5..0.95);
            let g = SmoothedInterpolant::new(s, zeta, r).unwrap();
            let closed = g.gtilde_h2_norm();
            let oracle = g.gtilde_taylor_h2_oracle(2000).unwrap();
            assert!(
                (closed - oracle).abs() <= 1e-6 * closed.max(1.0),
                "closed {closed} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn taylor_series_interpolates_the_resolvent_kernel() {
        // The smoothed function z -> g~(rz) must hit 1/(zeta - l_i) at every
        // node, i.e. the series of g~ evaluated at r l_i.
        let pts = [c(0.5, 0.0), c(-0.2, 0.0)];
        let zeta = c(1.0, 0.0);
        let min_dist: f64 = pts.iter().map(|p| (zeta - p).norm()).fold(f64::INFINITY, f64::min);
        let r = (1.0 - min_dist / (2.0 * pts.len() as f64)).sqrt();
        let g = SmoothedInterpolant::new(spectrum(&pts), zeta, r).unwrap();
        let coeffs = g.gtilde_taylor_coefficients(4000).unwrap();
        for &l in &pts {
            let got = evaluate_series(&coeffs, Complex64::new(r, 0.0) * l);
            let want = Complex64::ONE / (zeta - l);
            assert!((got - want).norm() <= 1e-8, "node {l}: {got} vs {want}");
        }

        let mut rng = sampling::rng_from_seed(75);
        for _ in 0..10 {
            let m = rng.random_range(1..=5);
            let s = sampling::random_spectrum(&mut rng, m, 0.85, 0.1);
            let zeta = sampling::annulus_point(&mut rng, 1.05, 1.8);
            let r = rng.random_range(0.5..0.9);
            let g = SmoothedInterpolant::new(s.clone(), zeta, r).unwrap();
            let coeffs = g.gtilde_taylor_coefficients(2000).unwrap();
            for &l in s.points() {
                let got = evaluate_series(&coeffs, Complex64::new(r, 0.0) * l);
                let want = Complex64::ONE / (zeta - l);
                assert!((got - want).norm() <= 1e-8 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn smoothed_interpolant_rejects_bad_inputs() {
        let s = spectrum(&[c(0.5, 0.0)]);
        assert!(matches!(
            SmoothedInterpolant::new(s.clone(), c(0.5, 5e-11), 0.8),
            Err(Error::ZetaOnSpectrum { .. })
        ));
        assert!(matches!(
            SmoothedInterpolant::new(s.clone(), c(1.0, 0.0), 1.0),
            Err(Error::InvalidParameter { name: "r", .. })
        ));
        assert!(matches!(
            SmoothedInterpolant::new(s.clone(), c(1.0, 0.0), 0.0),
            Err(Error::InvalidParameter { name: "r", .. })
        ));
        let g = SmoothedInterpolant::new(s, c(1.0, 0.0), 0.8).unwrap();
        assert!(matches!(
            g.gtilde_taylor_h2_oracle(99),
            Err(Error::InvalidParameter { name: "max_degree", .. })
        ));
    }
}

//! Seeded random generators for spectra, matrices, and test instances.
//!
//! Everything here is deterministic given the seed; the verification harness
//! and the property tests both rely on reproducible streams.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::blaschke::Spectrum;
use crate::linalg;
use crate::matrix::ComplexMatrix;

/// Fixed-stream RNG used throughout the crate for reproducible instances.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts are independent
/// normals scaled so that E|z|^2 = 1.
pub fn standard_complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform point (in area measure) in the closed disk of the given radius.
pub fn uniform_disk(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let u: f64 = rng.random();
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(radius * u.sqrt(), theta)
}

/// Uniform point on the unit circle.
pub fn unit_circle_point(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

/// Uniform point (in area measure) in the annulus r_min <= |z| <= r_max.
pub fn annulus_point(rng: &mut impl Rng, r_min: f64, r_max: f64) -> Complex64 {
    let u: f64 = rng.random();
    let radius_sq = r_min * r_min + u * (r_max * r_max - r_min * r_min);
    Complex64::from_polar(radius_sq.sqrt(), rng.random::<f64>() * std::f64::consts::TAU)
}

/// Spectrum of `degree` points in the disk of radius `radius` with all
/// pairwise gaps at least `min_gap` (rejection sampling with restarts).
///
/// The gap keeps divided-difference style sums well conditioned; identity
/// tests rely on it to hit 1e-10 agreement in double precision.
pub fn random_spectrum(
    rng: &mut impl Rng,
    degree: usize,
    radius: f64,
    min_gap: f64,
) -> Spectrum {
    assert!(degree >= 1, "spectrum degree must be at least 1");
    assert!(
        radius > 0.0 && radius <= 1.0 - 1e-9,
        "radius must lie strictly inside the unit disk"
    );
    'restart: loop {
        let mut points: Vec<Complex64> = Vec::with_capacity(degree);
        while points.len() < degree {
            let mut attempts = 0;
            loop {
                let candidate = uniform_disk(rng, radius);
                if points.iter().all(|p| (p - candidate).norm() >= min_gap) {
                    points.push(candidate);
                    break;
                }
                attempts += 1;
                if attempts > 200 {
                    continue 'restart;
                }
            }
        }
        return Spectrum::new(points).expect("sampled points satisfy the disk margin");
    }
}

/// Square matrix of independent standard complex Gaussians.
pub fn ginibre(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let entries: Vec<Complex64> = (0..n * n).map(|_| standard_complex(rng)).collect();
    ComplexMatrix::new(n, n, entries).expect("gaussian entries are finite")
}

/// Ginibre sample rescaled to the requested spectral norm. A target below 1
/// produces a strict contraction whose eigenvalues clear the disk margin
/// required by [`Spectrum`].
pub fn random_contraction(rng: &mut impl Rng, n: usize, target_norm: f64) -> ComplexMatrix {
    assert!(target_norm > 0.0, "target norm must be positive");
    loop {
        let g = ginibre(rng, n);
        let norm = linalg::spectral_norm(&g).expect("ginibre sample is finite");
        if norm > 1e-8 {
            return g.scale(Complex64::new(target_norm / norm, 0.0));
        }
    }
}

/// Strict contraction whose eigenvalues clear the unit-disk margin: a
/// Ginibre sample divided by `spectral_norm * (1 + 1e-12)`, then multiplied
/// by 0.99 whenever an eigenvalue lands within 1e-6 of the unit circle.
pub fn random_strict_contraction(rng: &mut impl Rng, n: usize) -> crate::error::Result<ComplexMatrix> {
    loop {
        let g = ginibre(rng, n);
        let norm = linalg::spectral_norm(&g)?;
        if norm <= 1e-8 {
            continue;
        }
        let mut a = g.scale(Complex64::new(1.0 / (norm * (1.0 + 1e-12)), 0.0));
        let spectral_radius = linalg::eigenvalues_dense(&a)?
            .iter()
            .map(|l| l.norm())
            .fold(0.0_f64, f64::max);
        if spectral_radius > 1.0 - 1e-6 {
            a = a.scale(Complex64::new(0.99, 0.0));
        }
        return Ok(a);
    }
}

/// Haar-like random unitary via Gram-Schmidt on a Ginibre sample.
///
/// A second orthogonalization pass keeps the columns unitary to roughly
/// machine precision for the moderate dimensions used in tests.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..n).map(|_| standard_complex(rng)).collect())
        .collect();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let proj: Complex64 = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for t in 0..n {
                    let correction = proj * cols[i][t];
                    cols[j][t] -= correction;
                }
            }
        }
        let norm = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "gram-schmidt hit a degenerate column");
        for t in 0..n {
            cols[j][t] /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |r, c| cols[c][r]).expect("orthonormal columns are finite")
}

/// Column-stochastic matrix with strictly positive entries: each column is a
/// uniform sample from the probability simplex (normalized unit-rate
/// exponentials). Positivity makes the chain irreducible and aperiodic, so
/// the stationary state is unique.
pub fn random_column_stochastic(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut entries = vec![Complex64::ZERO; n * n];
    for col in 0..n {
        let weights: Vec<f64> = (0..n)
            .map(|_| {
                let w: f64 = Exp1.sample(rng);
                w.max(1e-12)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        for row in 0..n {
            entries[row * n + col] = Complex64::new(weights[row] / total, 0.0);
        }
    }
    ComplexMatrix::new(n, n, entries).expect("simplex entries are finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_are_reproducible() {
        let a = random_spectrum(&mut rng_from_seed(11), 6, 0.9, 0.1);
        let b = random_spectrum(&mut rng_from_seed(11), 6, 0.9, 0.1);
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn spectrum_sampler_respects_radius_and_gap() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let s = random_spectrum(&mut rng, 8, 0.9, 0.15);
            for p in s.points() {
                assert!(p.norm() <= 0.9 + 1e-12);
            }
            for i in 0..8 {
                for j in i + 1..8 {
                    assert!((s.points()[i] - s.points()[j]).norm() >= 0.15);
                }
            }
        }
    }

    #[test]
    fn random_unitary_has_orthonormal_columns() {
        let mut rng = rng_from_seed(5);
        let u = random_unitary(&mut rng, 7);
        let gram = u.adjoint().mul(&u);
        let defect = gram.sub(&ComplexMatrix::identity(7)).max_abs();
        assert!(defect < 1e-12, "unitarity defect {defect:e}");
    }

    #[test]
    fn random_contraction_hits_requested_norm() {
        let mut rng = rng_from_seed(9);
        let a = random_contraction(&mut rng, 5, 0.999);
        let norm = linalg::spectral_norm(&a).unwrap();
        assert!((norm - 0.999).abs() < 1e-10, "norm {norm}");
    }

    #[test]
    fn strict_contraction_clears_disk_margin() {
        let mut rng = rng_from_seed(13);
        for n in [2usize, 4, 6, 8] {
            let a = random_strict_contraction(&mut rng, n).unwrap();
            let norm = linalg::spectral_norm(&a).unwrap();
            assert!(norm <= 1.0, "norm {norm}");
            for l in linalg::eigenvalues_dense(&a).unwrap() {
                assert!(l.norm() <= 1.0 - 1e-6, "eigenvalue modulus {}", l.norm());
            }
        }
    }

    #[test]
    fn stochastic_columns_sum_to_one() {
        let mut rng = rng_from_seed(2);
        let t = random_column_stochastic(&mut rng, 6);
        for col in 0..6 {
            let sum: f64 = (0..6).map(|row| t[(row, col)].re).sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for row in 0..6 {
                assert!(t[(row, col)].re > 0.0);
                assert_eq!(t[(row, col)].im, 0.0);
            }
        }
    }
}

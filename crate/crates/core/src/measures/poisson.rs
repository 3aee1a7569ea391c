//! The free Poisson (Marchenko–Pastur type) family.
//!
//! For intensity `λ > 0` the continuous part has density
//! `p_λ(x) = sqrt(4x - (1 - λ + x)^2) / (2πx)` on
//! `[(1-√λ)^2, (1+√λ)^2]`, and for `λ < 1` there is an atom at zero of
//! mass `1 - λ`. All free cumulants equal `λ`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::spectral::{CauchyFn, ContSpec, MomentRoute, PdfFn, SpectralMeasure};
use crate::quad::{self, EdgeKind};

/// Support endpoints of the continuous part.
pub fn free_poisson_edges(lambda: f64) -> (f64, f64) {
    let s = lambda.sqrt();
    ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
}

/// Pointwise density `p_λ(x)` (zero outside the support).
pub fn free_poisson_pdf(lambda: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let (a, b) = free_poisson_edges(lambda);
    let q = (x - a) * (b - x);
    if q <= 0.0 {
        return 0.0;
    }
    q.sqrt() / (2.0 * std::f64::consts::PI * x)
}

/// Closed-form Cauchy transform of the free Poisson law (atom included).
///
/// `G(z) = (z + 1 - λ - sqrt(z - a) sqrt(z - b)) / (2 z)`, where the
/// product of principal square roots realizes the branch with cut `[a, b]`
/// and `G(z) ~ 1/z` at infinity.
pub fn free_poisson_cauchy(lambda: f64) -> CauchyFn {
    let (a, b) = free_poisson_edges(lambda);
    Arc::new(move |z: Complex64| {
        let s = (z - a).sqrt() * (z - b).sqrt();
        (z + 1.0 - lambda - s) / (2.0 * z)
    })
}

/// The free Poisson measure of intensity `λ >= 0` (unit size).
pub fn free_poisson(lambda: f64) -> Result<SpectralMeasure> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::domain(format!("free Poisson intensity {lambda} must be >= 0")));
    }
    if lambda == 0.0 {
        return Ok(SpectralMeasure::point_mass(0.0));
    }
    let (a, b) = free_poisson_edges(lambda);
    let atoms = if lambda < 1.0 { vec![(0.0, 1.0 - lambda)] } else { vec![] };
    let pdf: PdfFn = Arc::new(move |x| free_poisson_pdf(lambda, x));
    let left_edge = if a <= 1e-12 * b { EdgeKind::InvSqrt } else { EdgeKind::SqrtZero };
    SpectralMeasure::with_density(
        atoms,
        ContSpec {
            edges: (left_edge, EdgeKind::SqrtZero),
            cauchy: Some(free_poisson_cauchy(lambda)),
            moment_route: MomentRoute::Quadrature,
            ..ContSpec::new((a, b), pdf)
        },
    )
}

/// Distribution function of the free Poisson law at `k`, right-continuous.
///
/// Evaluated directly from the closed-form density by edge-aware quadrature,
/// without building a measure.
pub fn free_poisson_cdf(lambda: f64, k: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::domain(format!("free Poisson intensity {lambda} must be >= 0")));
    }
    if k < 0.0 {
        return Ok(0.0);
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let atom = if lambda < 1.0 { 1.0 - lambda } else { 0.0 };
    let (a, b) = free_poisson_edges(lambda);
    if k <= a {
        return Ok(atom);
    }
    if k >= b {
        return Ok(1.0);
    }
    Ok(atom + free_poisson_partial_integral(lambda, k))
}

/// `∫_a^{min(k, b)} p_λ`, the continuous mass below `k`.
pub(crate) fn free_poisson_partial_integral(lambda: f64, k: f64) -> f64 {
    let (a, b) = free_poisson_edges(lambda);
    let upper = k.min(b);
    if upper <= a {
        return 0.0;
    }
    let left_edge = if a <= 1e-12 * b { EdgeKind::InvSqrt } else { EdgeKind::SqrtZero };
    let right_edge = if upper >= b - 1e-12 * b { EdgeKind::SqrtZero } else { EdgeKind::Smooth };
    quad::integrate_edge_aware(
        &|x| free_poisson_pdf(lambda, x),
        a,
        upper,
        (left_edge, right_edge),
        1e-11,
    )
}

/// A family of scaled free Poisson variables: intensities `λ_i > 0` and
/// sizes `b_i >= 0`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SizedPoissonFamily {
    entries: Vec<(f64, f64)>,
}

impl SizedPoissonFamily {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("family needs at least one entry".to_string()));
        }
        for &(lambda, size) in &entries {
            if !lambda.is_finite() || lambda <= 0.0 {
                return Err(Error::domain(format!("intensity {lambda} must be positive")));
            }
            if !size.is_finite() || size < 0.0 {
                return Err(Error::domain(format!("size {size} must be nonnegative")));
            }
        }
        Ok(SizedPoissonFamily { entries })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// `K = Σ λ_i`.
    pub fn total_intensity(&self) -> f64 {
        self.entries.iter().map(|&(l, _)| l).sum()
    }

    /// `b = max b_i`.
    pub fn max_size(&self) -> f64 {
        self.entries.iter().map(|&(_, b)| b).fold(0.0, f64::max)
    }

    /// Certified upper bound `b (2K + 3√K + 1)` on the operator norm of
    /// `Σ b_i M_i` for freely independent Poissons `M_i`.
    pub fn norm_bound(&self) -> f64 {
        let k = self.total_intensity();
        self.max_size() * (2.0 * k + 3.0 * k.sqrt() + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_intensity_has_atom() {
        let m = free_poisson(0.25).unwrap();
        assert_eq!(m.atoms(), &[(0.0, 0.75)]);
        assert_abs_diff_eq!(m.cont().unwrap().mass, 0.25, epsilon = 1e-9);
        let (a, b) = free_poisson_edges(0.25);
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 2.25, epsilon = 1e-15);
    }

    #[test]
    fn unit_intensity_density_value_and_support() {
        let m = free_poisson(1.0).unwrap();
        assert!(m.atoms().is_empty());
        assert_eq!(m.support_edges(), (0.0, 4.0));
        // p_1(2) = 1/(2π)
        assert_abs_diff_eq!(
            free_poisson_pdf(1.0, 2.0),
            1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(m.cont().unwrap().mass, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn zero_intensity_degenerates() {
        let m = free_poisson(0.0).unwrap();
        assert_eq!(m.as_point_mass(), Some(0.0));
        assert!(free_poisson(-0.1).is_err());
    }

    #[test]
    fn cdf_values() {
        assert_abs_diff_eq!(free_poisson_cdf(0.25, 0.0).unwrap(), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(free_poisson_cdf(1.0, 4.0).unwrap(), 1.0, epsilon = 1e-12);
        // pinned by quadrature: ∫_0^1 p_1 = 1/3 + sqrt(3)/(2π)
        let expected = 1.0 / 3.0 + 3.0f64.sqrt() / (2.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(free_poisson_cdf(1.0, 1.0).unwrap(), expected, epsilon = 1e-8);
        assert_eq!(free_poisson_cdf(1.0, -0.5).unwrap(), 0.0);
        assert_eq!(free_poisson_cdf(0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn cdf_is_right_continuous_and_monotone() {
        for lambda in [0.25, 0.5, 1.0, 2.0] {
            let mut last = -1.0;
            for j in 0..=400 {
                let k = -0.5 + 5.5 * j as f64 / 400.0;
                let v = free_poisson_cdf(lambda, k).unwrap();
                assert!(v >= last - 1e-10, "lambda={lambda} k={k}");
                last = v;
            }
            // jump exactly at zero equals the atom
            if lambda < 1.0 {
                let below = free_poisson_cdf(lambda, -1e-12).unwrap();
                let at = free_poisson_cdf(lambda, 0.0).unwrap();
                assert_abs_diff_eq!(at - below, 1.0 - lambda, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cauchy_transform_recovers_density() {
        for lambda in [0.5, 1.0, 1.7] {
            let g = free_poisson_cauchy(lambda);
            // Im G < 0 in the upper half plane
            for &(x, y) in &[(0.5, 0.1), (2.0, 1.0), (-1.0, 0.3), (5.0, 2.0)] {
                let v = g(Complex64::new(x, y));
                assert!(v.im < 0.0, "lambda={lambda} z=({x},{y})");
            }
            // -Im G(x + i eta)/pi approximates the density
            for x in [0.8, 1.5, 2.5] {
                let eta = 1e-6;
                let approx_p = -g(Complex64::new(x, eta)).im / std::f64::consts::PI;
                assert_abs_diff_eq!(approx_p, free_poisson_pdf(lambda, x), epsilon = 1e-4);
            }
            // G ~ 1/z at infinity
            let z = Complex64::new(80.0, 20.0);
            assert!((g(z) * z - 1.0).norm() < 0.05);
        }
    }

    #[test]
    fn atom_recovered_from_transform() {
        let g = free_poisson_cauchy(0.25);
        let eta = 1e-8;
        let m = -eta * g(Complex64::new(0.0, eta)).im;
        assert_abs_diff_eq!(m, 0.75, epsilon = 1e-4);
    }

    #[test]
    fn family_norm_bound_values() {
        let single = SizedPoissonFamily::new(vec![(1.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(single.norm_bound(), 6.0, epsilon = 1e-14);
        // support of free Poisson(1) is [0, 4] inside [0, 6]
        assert!(free_poisson(1.0).unwrap().support_edges().1 <= single.norm_bound());

        let zero = SizedPoissonFamily::new(vec![(0.5, 0.0), (1.5, 0.0)]).unwrap();
        assert_eq!(zero.norm_bound(), 0.0);

        let two = SizedPoissonFamily::new(vec![(0.5, 2.0), (0.5, 1.0)]).unwrap();
        assert_abs_diff_eq!(two.total_intensity(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.max_size(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.norm_bound(), 12.0, epsilon = 1e-14);

        assert!(SizedPoissonFamily::new(vec![(0.0, 1.0)]).is_err());
        assert!(SizedPoissonFamily::new(vec![(1.0, -1.0)]).is_err());
        assert!(SizedPoissonFamily::new(vec![]).is_err());
    }
}

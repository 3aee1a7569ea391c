//! The free binomial: the n-fold free additive convolution power of a
//! Bernoulli law.
//!
//! Writing `g = G(z)` for the Cauchy transform, adding the Bernoulli
//! R-transform n times and eliminating the inverse gives a quadratic
//! `a(z) g^2 + b(z) g + c = 0` with
//!
//! ```text
//! a(z) = 4 z (z - n)
//! b(z) = 4 (n - 2) z - 2 u,   u = n(n-2) + n^2 (2p - 1)
//! c    = -4 (n - 1)
//! ```
//!
//! so the density, the support edges, and the transform are all closed
//! forms. The continuous support is the root interval of the discriminant
//! `disc(x) = 16 n^2 x^2 - 16 [ (n-2) u + 4 n (n-1) ] x + 4 u^2`, the
//! atoms sit at 0 and n with masses `(1 - np)_+` and `(1 - n(1-p))_+`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::spectral::{CauchyFn, ContSpec, MomentRoute, PdfFn, SpectralMeasure};
use crate::quad::{self, EdgeKind};

fn coeff_u(n: f64, p: f64) -> f64 {
    n * (n - 2.0) + n * n * (2.0 * p - 1.0)
}

/// Support endpoints of the continuous part (roots of the discriminant).
pub fn free_binomial_edges(n: u64, p: f64) -> (f64, f64) {
    let nf = n as f64;
    let u = coeff_u(nf, p);
    // disc(x)/4 = 4 n^2 x^2 - 4 [ (n-2) u + 4 n (n-1) ] x + u^2
    let b_half = (nf - 2.0) * u + 4.0 * nf * (nf - 1.0);
    let det = (b_half * b_half - nf * nf * u * u).max(0.0);
    let root = det.sqrt();
    let denom = 2.0 * nf * nf;
    let lo = (b_half - root) / denom;
    let hi = (b_half + root) / denom;
    (lo.clamp(0.0, nf), hi.clamp(0.0, nf))
}

/// Discriminant of the Cauchy-transform quadratic at a real point.
fn disc_at(n: f64, u: f64, x: f64) -> f64 {
    16.0 * n * n * x * x - 16.0 * ((n - 2.0) * u + 4.0 * n * (n - 1.0)) * x + 4.0 * u * u
}

/// Pointwise density of the free binomial (zero outside the support).
pub fn free_binomial_pdf(n: u64, p: f64, x: f64) -> f64 {
    let nf = n as f64;
    if x <= 0.0 || x >= nf {
        return 0.0;
    }
    let u = coeff_u(nf, p);
    let d = disc_at(nf, u, x);
    if d >= 0.0 {
        return 0.0;
    }
    let a = 4.0 * x * (x - nf);
    (-d).sqrt() / (2.0 * std::f64::consts::PI * a.abs())
}

/// Closed-form Cauchy transform. The quadratic branch is tracked by a
/// homotopy from high in the upper half plane, where `G ~ 1/z` identifies
/// the root, down to the requested point.
pub fn free_binomial_cauchy(n: u64, p: f64) -> CauchyFn {
    let nf = n as f64;
    let u = coeff_u(nf, p);
    Arc::new(move |z: Complex64| cauchy_homotopy(nf, u, z))
}

fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    // Citardauq pairing keeps both roots stable when |a| is small
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b + disc).norm() >= (b - disc).norm() {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    (q / a, c / q)
}

fn roots_at(n: f64, u: f64, z: Complex64) -> (Complex64, Complex64) {
    let a = 4.0 * z * (z - n);
    let b = 4.0 * (n - 2.0) * z - 2.0 * u;
    let c = Complex64::new(-4.0 * (n - 1.0), 0.0);
    if a.norm() < 1e-300 {
        let g = -c / b;
        return (g, g);
    }
    quadratic_roots(a, b, c)
}

fn cauchy_homotopy(n: f64, u: f64, z: Complex64) -> Complex64 {
    // start high above, where the root closest to 1/z is unambiguous
    let high = (2.0 * (n + 1.0)).max(4.0 * z.im.abs()).max(4.0);
    let start = Complex64::new(z.re, high);
    let (r1, r2) = roots_at(n, u, start);
    let asym = 1.0 / start;
    let mut g = if (r1 - asym).norm() <= (r2 - asym).norm() { r1 } else { r2 };
    // geometric descent in the imaginary part
    let steps = 48;
    let target_im = z.im.max(1e-300);
    let ratio = (target_im / high).powf(1.0 / steps as f64);
    let mut im = high;
    for k in 0..=steps {
        let zc = if k == steps { z } else { Complex64::new(z.re, im) };
        let (r1, r2) = roots_at(n, u, zc);
        g = if (r1 - g).norm() <= (r2 - g).norm() { r1 } else { r2 };
        im *= ratio;
    }
    g
}

/// The n-fold free convolution power of `(1-p) δ_0 + p δ_1`.
pub fn free_binomial(n: u64, p: f64) -> Result<SpectralMeasure> {
    if n < 1 {
        return Err(Error::domain("free binomial needs n >= 1".to_string()));
    }
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::domain(format!("Bernoulli parameter {p} outside [0, 1]")));
    }
    let nf = n as f64;
    if p == 0.0 {
        return Ok(SpectralMeasure::point_mass(0.0));
    }
    if p == 1.0 {
        return Ok(SpectralMeasure::point_mass(nf));
    }
    if n == 1 {
        return SpectralMeasure::bernoulli(p);
    }

    let mut atoms = Vec::new();
    let atom0 = (1.0 - nf * p).max(0.0);
    let atomn = (1.0 - nf * (1.0 - p)).max(0.0);
    if atom0 > 0.0 {
        atoms.push((0.0, atom0));
    }
    if atomn > 0.0 {
        atoms.push((nf, atomn));
    }

    let (lo, hi) = free_binomial_edges(n, p);
    let pdf: PdfFn = Arc::new(move |x| free_binomial_pdf(n, p, x));
    let left_edge = if lo <= 1e-12 * nf { EdgeKind::InvSqrt } else { EdgeKind::SqrtZero };
    let right_edge = if hi >= nf * (1.0 - 1e-12) { EdgeKind::InvSqrt } else { EdgeKind::SqrtZero };
    SpectralMeasure::with_density(
        atoms,
        ContSpec {
            edges: (left_edge, right_edge),
            cauchy: Some(free_binomial_cauchy(n, p)),
            moment_route: MomentRoute::Quadrature,
            ..ContSpec::new((lo, hi), pdf)
        },
    )
}

/// Distribution function of the free binomial at `k`, right-continuous,
/// evaluated without building a measure.
pub fn free_binomial_cdf(n: u64, p: f64, k: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("free binomial needs n >= 1".to_string()));
    }
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::domain(format!("Bernoulli parameter {p} outside [0, 1]")));
    }
    if k < 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    if p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(if k >= nf { 1.0 } else { 0.0 });
    }
    if n == 1 {
        return Ok(if k >= 1.0 { 1.0 } else { 1.0 - p });
    }
    if k >= nf {
        return Ok(1.0);
    }
    let atom0 = (1.0 - nf * p).max(0.0);
    let (lo, hi) = free_binomial_edges(n, p);
    if k <= lo {
        return Ok(atom0);
    }
    if k >= hi {
        // everything except a possible atom at n
        let atomn = (1.0 - nf * (1.0 - p)).max(0.0);
        return Ok(1.0 - atomn);
    }
    let upper = k.min(hi);
    let left_edge = if lo <= 1e-12 * nf { EdgeKind::InvSqrt } else { EdgeKind::SqrtZero };
    let right_edge = if upper >= hi - 1e-12 * nf { EdgeKind::SqrtZero } else { EdgeKind::Smooth };
    let integral = quad::integrate_edge_aware(
        &|x| free_binomial_pdf(n, p, x),
        lo,
        upper,
        (left_edge, right_edge),
        1e-11,
    );
    Ok((atom0 + integral).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn n_one_is_bernoulli() {
        let m = free_binomial(1, 0.3).unwrap();
        assert_eq!(m.atoms(), &[(0.0, 0.7), (1.0, 0.3)]);
        assert!(m.cont().is_none());
    }

    #[test]
    fn degenerate_parameters() {
        assert_eq!(free_binomial(5, 0.0).unwrap().as_point_mass(), Some(0.0));
        assert_eq!(free_binomial(5, 1.0).unwrap().as_point_mass(), Some(5.0));
        assert!(free_binomial(0, 0.5).is_err());
        assert!(free_binomial(2, 1.5).is_err());
    }

    #[test]
    fn two_fold_half_is_arcsine() {
        // Bernoulli(1/2) ⊞ Bernoulli(1/2) = arcsine on [0, 2]
        let (lo, hi) = free_binomial_edges(2, 0.5);
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 2.0, epsilon = 1e-12);
        for x in [0.1f64, 0.5, 1.0, 1.5, 1.9] {
            let want = 1.0 / (std::f64::consts::PI * (x * (2.0 - x)).sqrt());
            assert_abs_diff_eq!(free_binomial_pdf(2, 0.5, x), want, epsilon = 1e-12);
        }
        let m = free_binomial(2, 0.5).unwrap();
        assert!(m.atoms().is_empty());
        assert_eq!(m.support_edges(), (0.0, 2.0));
    }

    #[test]
    fn atom_masses_at_both_ends() {
        // n p < 1: atom at zero
        let m = free_binomial(2, 0.25).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_abs_diff_eq!(m.atoms()[0].0, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(m.atoms()[0].1, 0.5, epsilon = 1e-12);
        // p close to 1: atom at n
        let m = free_binomial(2, 0.9).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_abs_diff_eq!(m.atoms()[0].0, 2.0, epsilon = 0.0);
        assert_abs_diff_eq!(m.atoms()[0].1, 0.8, epsilon = 1e-12);
        // middle: no atoms
        assert!(free_binomial(3, 0.45).unwrap().atoms().is_empty());
    }

    #[test]
    fn support_is_inside_zero_n() {
        for (n, p) in [(2u64, 0.5), (4, 0.3), (16, 0.0625), (100, 0.01), (64, 0.9)] {
            let (lo, hi) = free_binomial_edges(n, p);
            assert!(lo >= 0.0 && hi <= n as f64 && lo < hi, "n={n} p={p} -> ({lo}, {hi})");
        }
        // n -> inf with p = 1/n approaches the free Poisson(1) support [0, 4]
        let (lo, hi) = free_binomial_edges(100, 0.01);
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(hi, 3.96, epsilon = 1e-10);
    }

    #[test]
    fn cdf_matches_atom_and_total() {
        // atom at zero is the k = 0 value
        assert_abs_diff_eq!(free_binomial_cdf(2, 0.25, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_eq!(free_binomial_cdf(2, 0.25, -0.1).unwrap(), 0.0);
        assert_abs_diff_eq!(free_binomial_cdf(2, 0.25, 2.0).unwrap(), 1.0, epsilon = 1e-9);
        // max(2F - 1, 0) with F = 0.75 -> atom 0.5
        assert_abs_diff_eq!(free_binomial_cdf(2, 0.25, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        // monotone, right-continuous sweep
        for (n, p) in [(2u64, 0.5), (7, 0.2), (32, 0.03)] {
            let mut last = -1.0;
            for j in 0..=300 {
                let k = -0.2 + (n as f64 + 0.4) * j as f64 / 300.0;
                let v = free_binomial_cdf(n, p, k).unwrap();
                assert!(v >= last - 1e-10);
                last = v;
            }
            assert_abs_diff_eq!(last, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn extreme_parameters_keep_mass_bookkeeping() {
        // nearly degenerate Bernoulli parameters leave a sliver of
        // continuous mass around 1 (resp. n - 1) plus one large atom
        let m = free_binomial(2, 1e-12).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert!((m.atoms()[0].1 - (1.0 - 2e-12)).abs() < 1e-15);
        assert!(m.cont().unwrap().mass() < 1e-11);
        let m = free_binomial(2, 1.0 - 1e-12).unwrap();
        assert_eq!(m.atoms()[0].0, 2.0);
        assert!((free_binomial_cdf(2, 1e-12, 0.0).unwrap() - (1.0 - 2e-12)).abs() < 1e-15);
    }

    #[test]
    fn cauchy_transform_matches_density() {
        for (n, p) in [(2u64, 0.5), (5, 0.3), (10, 0.05)] {
            let g = free_binomial_cauchy(n, p);
            let (lo, hi) = free_binomial_edges(n, p);
            for j in 1..8 {
                let x = lo + (hi - lo) * j as f64 / 8.0;
                let v = g(Complex64::new(x, 1e-7));
                assert!(v.im < 0.0);
                let density = -v.im / std::f64::consts::PI;
                assert_abs_diff_eq!(density, free_binomial_pdf(n, p, x), epsilon = 1e-4);
            }
            // 1/z asymptotics
            let z = Complex64::new(50.0 * n as f64, 3.0);
            assert!((g(z) * z - 1.0).norm() < 0.2);
            // atom residue at zero
            let atom0 = (1.0 - n as f64 * p).max(0.0);
            if atom0 > 0.0 {
                let eta = 1e-8;
                let m = -eta * g(Complex64::new(0.0, eta)).im;
                assert_abs_diff_eq!(m, atom0, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn mass_of_continuous_part_is_consistent() {
        for (n, p) in [(2u64, 0.5), (2, 0.25), (4, 0.1), (100, 0.01), (3, 0.8)] {
            let nf = n as f64;
            let atom0 = (1.0 - nf * p).max(0.0);
            let atomn = (1.0 - nf * (1.0 - p)).max(0.0);
            let (lo, hi) = free_binomial_edges(n, p);
            let mass = quad::integrate_edge_aware(
                &|x| free_binomial_pdf(n, p, x),
                lo,
                hi,
                (EdgeKind::InvSqrt, EdgeKind::InvSqrt),
                1e-11,
            );
            assert_abs_diff_eq!(mass + atom0 + atomn, 1.0, epsilon = 1e-8, );
        }
    }
}

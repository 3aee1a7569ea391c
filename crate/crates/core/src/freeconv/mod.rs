//! Numerical free additive convolution and the moment/free-cumulant
//! correspondence.

pub mod binomial;
pub mod cauchy;
pub mod cumulants;
pub mod subordination;

use num_complex::Complex64;

pub use binomial::{free_binomial, free_binomial_cdf, free_binomial_edges, free_binomial_pdf};
pub use cauchy::CauchyGrid;
pub use cumulants::{
    cumulants_to_moments, mixed_moment, moments_to_cumulants, non_crossing_partitions,
    FreeCumulantSeq, MomentSeq, DEFAULT_ORDER,
};

use crate::error::Result;
use crate::measures::spectral::{MomentRoute, SpectralMeasure};
use crate::quad;

/// Default grid resolution for convolution outputs.
pub const CONV_GRID: usize = 2048;

/// Free additive convolution `μ ⊞ ν`.
///
/// Computed by subordination of the Cauchy transforms, Stieltjes inversion
/// with extrapolation in the contour height, and atom recovery. Convolving
/// with a point mass is a translation and is exact.
pub fn free_convolve(mu: &SpectralMeasure, nu: &SpectralMeasure) -> Result<SpectralMeasure> {
    subordination::convolve_measures(mu, nu, CONV_GRID)
}

/// `μ ⊞ ν` with an explicit output grid resolution.
pub fn free_convolve_with_grid(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    grid_n: usize,
) -> Result<SpectralMeasure> {
    subordination::convolve_measures(mu, nu, grid_n)
}

/// Smallest and largest points of the support of a measure.
pub fn support_edges(mu: &SpectralMeasure) -> (f64, f64) {
    mu.support_edges()
}

/// Evaluate the Cauchy transform of a measure along the contour
/// `Im z = eta`, with the half-plane invariant checked.
pub fn cauchy_grid(mu: &SpectralMeasure, xs: Vec<f64>, eta: f64) -> Result<CauchyGrid> {
    let g = mu.cauchy_fn();
    CauchyGrid::evaluate(&g, xs, eta)
}

/// Raw moments `m_1 ... m_order` of a measure.
///
/// Atom contributions are exact. The continuous part is integrated by the
/// route recorded in the measure: edge-aware quadrature of a closed-form
/// density, exact integration of the piecewise-linear grid model, or a
/// contour integral of the Cauchy transform for convolution outputs.
pub fn moments_from_measure(mu: &SpectralMeasure, order: usize) -> Result<MomentSeq> {
    assert!(order >= 1, "moment order must be >= 1");
    let route = mu.cont().map(|c| c.moment_route);
    match route {
        Some(MomentRoute::Contour) => {
            let g = mu.cauchy_fn();
            let (lo, hi) = mu.support_edges();
            let m = contour_moments(&|z| g(z), (lo, hi), order);
            MomentSeq::new(m[1..].to_vec())
        }
        _ => {
            let mut values = vec![0.0; order];
            for &(a, mass) in mu.atoms() {
                let mut p = 1.0;
                for v in values.iter_mut() {
                    p *= a;
                    *v += mass * p;
                }
            }
            if let Some(c) = mu.cont() {
                let (lo, hi) = c.support;
                let scale = lo.abs().max(hi.abs()).max(1.0);
                for (j, v) in values.iter_mut().enumerate() {
                    let power = (j + 1) as i32;
                    let tol = 1e-12 * scale.powi(power).max(1.0);
                    let integral = match c.moment_route {
                        MomentRoute::Quadrature => quad::integrate_edge_aware(
                            &|x: f64| x.powi(power) * mu.pdf_at(x),
                            lo,
                            hi,
                            c.edges,
                            tol,
                        ),
                        _ => quad::adaptive_simpson(
                            &|x: f64| x.powi(power) * mu.pdf_at(x),
                            lo,
                            hi,
                            tol,
                        ),
                    };
                    *v += integral;
                }
            }
            MomentSeq::new(values)
        }
    }
}

/// Moments `m_0 ... m_order` of the whole measure by a contour integral
/// `m_j = (2πi)^{-1} ∮ z^j G(z) dz` on a circle slightly outside the
/// support, with midpoint nodes and Schwarz reflection into the lower half
/// plane.
pub(crate) fn contour_moments<F: Fn(Complex64) -> Complex64>(
    g: &F,
    support: (f64, f64),
    order: usize,
) -> Vec<f64> {
    let center = 0.5 * (support.0 + support.1);
    let radius = 1.05 * 0.5 * (support.1 - support.0) + 0.05;
    let n = 1024usize;
    let mut moments = vec![0.0; order + 1];
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let e = Complex64::from_polar(1.0, theta);
        let z = center + radius * e;
        let gv = if z.im > 0.0 {
            g(z)
        } else {
            g(z.conj()).conj()
        };
        let w = radius / n as f64 * e * gv;
        let mut zp = Complex64::new(1.0, 0.0);
        for m in moments.iter_mut() {
            *m += (zp * w).re;
            zp *= z;
        }
    }
    moments
}

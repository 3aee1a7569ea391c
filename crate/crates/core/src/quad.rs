//! Adaptive quadrature and grid utilities.
//!
//! The measures handled by this crate have densities with square-root or
//! inverse-square-root behaviour at the support edges, so the integrators
//! here substitute `x = edge ± u^2` near each endpoint before handing the
//! smooth remainder to adaptive Simpson.

/// How a density behaves at a support endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Density extends smoothly to the endpoint.
    Smooth,
    /// Density vanishes like `sqrt(|x - edge|)`.
    SqrtZero,
    /// Density diverges like `1/sqrt(|x - edge|)`.
    InvSqrt,
}

impl EdgeKind {
    /// The `x = edge ± u^2` substitution regularizes both singular kinds.
    pub fn needs_substitution(self) -> bool {
        !matches!(self, EdgeKind::Smooth)
    }
}

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// Plain Simpson on the whole interval is refined by interval halving with
/// the usual 1/15 error estimate; recursion is capped so that a genuinely
/// singular integrand terminates with the best estimate found.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || (b - a) < 1e-14 * (1.0 + a.abs() + b.abs()) {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integrate a density over `[a, b]` with edge-aware substitutions.
///
/// The interval is split into two edge strips and a core. On the left strip
/// `x = a + u^2` turns `C (x-a)^(±1/2)` into a polynomially smooth function
/// of `u` (`2 C u^2` resp. `2 C`), and symmetrically on the right.
pub fn integrate_edge_aware<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    edges: (EdgeKind, EdgeKind),
    tol: f64,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let width = b - a;
    let strip = 0.25 * width;
    let (left, right) = edges;
    let lo = if left.needs_substitution() { a + strip } else { a };
    let hi = if right.needs_substitution() { b - strip } else { b };

    let mut total = 0.0;
    // an exact endpoint evaluation would hit the singularity (0 * inf);
    // start a hair inside and close the sliver by constant extrapolation,
    // which is exact to O(u0^3) for both edge kinds
    if left.needs_substitution() {
        let u_max = strip.sqrt();
        let u0 = u_max * 1e-9;
        let g = |u: f64| 2.0 * u * f(a + u * u);
        total += adaptive_simpson(&g, u0, u_max, tol / 3.0) + g(u0) * u0;
    }
    if right.needs_substitution() {
        let u_max = strip.sqrt();
        let u0 = u_max * 1e-9;
        let g = |u: f64| 2.0 * u * f(b - u * u);
        total += adaptive_simpson(&g, u0, u_max, tol / 3.0) + g(u0) * u0;
    }
    if hi > lo {
        total += adaptive_simpson(f, lo, hi, tol / 3.0);
    }
    total
}

/// Cosine-clustered grid on `[a, b]`: Chebyshev extrema mapped to the
/// interval, so nodes accumulate near both endpoints.
pub fn clustered_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two nodes");
    let mut xs = Vec::with_capacity(n);
    for j in 0..n {
        let theta = std::f64::consts::PI * j as f64 / (n - 1) as f64;
        // 0.5 - 0.5 cos(theta) runs 0 -> 1 with quadratic clustering at ends
        xs.push(a + (b - a) * 0.5 * (1.0 - theta.cos()));
    }
    xs[0] = a;
    xs[n - 1] = b;
    xs
}

/// Uniformly spaced grid on `[a, b]` (inclusive).
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two nodes");
    (0..n)
        .map(|j| a + (b - a) * j as f64 / (n - 1) as f64)
        .collect()
}

/// Richardson extrapolation to zero from samples `(h_i, f(h_i))` via the
/// Neville tableau. Nodes must be distinct and positive.
pub fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len();
    assert!(n >= 1);
    let mut val: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let hs: Vec<f64> = samples.iter().map(|&(h, _)| h).collect();
    for level in 1..n {
        for i in 0..n - level {
            let h0 = hs[i];
            let h1 = hs[i + level];
            val[i] = (h0 * val[i + 1] - h1 * val[i]) / (h0 - h1);
        }
    }
    val[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_polynomial_is_near_exact() {
        let v = adaptive_simpson(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12);
        // antiderivative x^4/4 - x^2 + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert_abs_diff_eq!(v, exact, epsilon = 1e-10);
    }

    #[test]
    fn edge_substitution_handles_inverse_sqrt() {
        // integral of 1/sqrt(x) over (0, 1] = 2
        let v = integrate_edge_aware(
            &|x: f64| 1.0 / x.sqrt(),
            0.0,
            1.0,
            (EdgeKind::InvSqrt, EdgeKind::Smooth),
            1e-11,
        );
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn edge_substitution_handles_sqrt_vanishing() {
        // integral of sqrt(1-x) over [0, 1] = 2/3
        let v = integrate_edge_aware(
            &|x: f64| (1.0 - x).sqrt(),
            0.0,
            1.0,
            (EdgeKind::Smooth, EdgeKind::SqrtZero),
            1e-11,
        );
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn semicircle_mass_is_one() {
        // density of the standard semicircle on [-2, 2]
        let p = |x: f64| (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI);
        let v = integrate_edge_aware(&p, -2.0, 2.0, (EdgeKind::SqrtZero, EdgeKind::SqrtZero), 1e-11);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn clustered_grid_hits_endpoints_and_is_increasing() {
        let xs = clustered_grid(-1.5, 2.5, 33);
        assert_eq!(xs[0], -1.5);
        assert_eq!(xs[32], 2.5);
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn extrapolation_kills_linear_error() {
        // f(h) = 3 + 2h + h^2
        let samples = [(0.4, 3.0 + 0.8 + 0.16), (0.2, 3.0 + 0.4 + 0.04), (0.1, 3.0 + 0.2 + 0.01)];
        assert_abs_diff_eq!(extrapolate_to_zero(&samples), 3.0, epsilon = 1e-12);
    }
}

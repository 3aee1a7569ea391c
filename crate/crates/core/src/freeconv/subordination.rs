//! Free additive convolution by analytic subordination.
//!
//! For measures `μ`, `ν` with reciprocal Cauchy transforms
//! `F_i(z) = 1/G_i(z)` and `H_i(z) = F_i(z) - z`, the subordination
//! functions satisfy `ω_1(z) = z + H_ν(z + H_μ(ω_1(z)))`, and
//! `G_{μ⊞ν}(z) = G_μ(ω_1(z))`. The map is iterated with damping 0.5 at
//! each contour point; the density is recovered by Stieltjes inversion
//! with Richardson extrapolation in the contour height.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::spectral::{
    CauchyFn, ContPart, MomentRoute, PdfFn, SpectralMeasure,
};
use crate::quad::{self, EdgeKind};

/// Relative fixed-point tolerance.
const FP_TOL: f64 = 1e-14;
/// Iteration cap per contour point.
const FP_MAX_ITER: usize = 8_000;
/// A residual below this still counts as converged at the cap.
const FP_ACCEPT: f64 = 1e-9;
/// Contour heights used for inversion: `{4η*, 2η*, η*}` with `η*` scaled to
/// the distance from the support edges and clamped to this range.
const ETA_FLOOR: f64 = 1e-5;
const ETA_TOP: f64 = 1e-3;

pub(crate) struct Subordination {
    g1: CauchyFn,
    g2: CauchyFn,
}

impl Subordination {
    pub fn new(g1: CauchyFn, g2: CauchyFn) -> Self {
        Subordination { g1, g2 }
    }

    fn step(&self, z: Complex64, w: Complex64) -> Complex64 {
        let h1 = 1.0 / (self.g1)(w) - w;
        let u = z + h1;
        let h2 = 1.0 / (self.g2)(u) - u;
        z + h2
    }

    /// Solve for `ω_1(z)` by damped Picard iteration with Aitken
    /// acceleration. The damped sequence converges linearly (arbitrarily
    /// slowly near the support at small contour heights); the Δ²-jump
    /// collapses the geometric tail, so hard points still finish in tens of
    /// iterations.
    pub fn omega1(&self, z: Complex64, warm: Option<Complex64>) -> Result<Complex64> {
        let mut w = warm.unwrap_or(z);
        if w.im < z.im {
            w = Complex64::new(w.re, z.im);
        }
        let mut prev_delta: Option<Complex64> = None;
        let mut best = (f64::INFINITY, w);
        let mut since_improvement = 0usize;
        for iter in 0..FP_MAX_ITER {
            let t = self.step(z, w);
            let delta = t - w;
            let residual = delta.norm();
            let scale = 1.0 + t.norm();
            if residual <= FP_TOL * scale {
                return Ok(t);
            }
            if residual < 0.999 * best.0 {
                best = (residual, t);
                since_improvement = 0;
            } else {
                since_improvement += 1;
                if since_improvement > 256 {
                    break; // stalled at the round-off floor
                }
            }
            // Δ² jump for the half-damped linear iteration:
            // w* = w - Δ_k Δ_{k-1} / (2 (Δ_k - Δ_{k-1}))
            if let Some(pd) = prev_delta {
                if iter % 4 == 3 {
                    let denom = delta - pd;
                    if denom.norm() > 1e-8 * residual {
                        let jump = w - delta * (pd / denom) * 0.5;
                        if jump.im > 0.0 {
                            let tj = self.step(z, jump);
                            let rj = (tj - jump).norm();
                            if rj <= FP_TOL * (1.0 + tj.norm()) {
                                return Ok(tj);
                            }
                            if rj < residual {
                                if rj < best.0 {
                                    best = (rj, tj);
                                    since_improvement = 0;
                                }
                                w = jump;
                                prev_delta = None;
                                continue;
                            }
                        }
                    }
                }
            }
            prev_delta = Some(delta);
            w += 0.5 * delta;
        }
        if best.0 <= FP_ACCEPT * (1.0 + best.1.norm()) {
            Ok(best.1)
        } else {
            Err(Error::numerical(
                format!("subordination fixed point stalled at z = {z}"),
                best.0,
            ))
        }
    }

    /// `G_{μ⊞ν}(z)` together with the subordination point used.
    pub fn convolved_g(&self, z: Complex64, warm: Option<Complex64>) -> Result<(Complex64, Complex64)> {
        let w = self.omega1(z, warm)?;
        Ok(((self.g1)(w), w))
    }
}

/// Atoms of `μ ⊞ ν`: there is an atom at `a + b` of mass
/// `μ({a}) + ν({b}) - 1` exactly when that quantity is positive.
pub(crate) fn convolved_atoms(mu: &SpectralMeasure, nu: &SpectralMeasure) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, ma) in mu.atoms() {
        for &(b, mb) in nu.atoms() {
            let mass = ma + mb - 1.0;
            if mass > 0.0 {
                out.push((a + b, mass));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// Continuous density of the convolution at `x`: Stieltjes inversion of the
/// atom-subtracted transform, Richardson-extrapolated over an eta ladder
/// scaled to the distance from the support edges.
fn inversion_density_warm(
    sub: &Subordination,
    atoms: &[(f64, f64)],
    support: (f64, f64),
    x: f64,
    warm: Option<Complex64>,
) -> (f64, Option<Complex64>) {
    let dist = (x - support.0).abs().min((support.1 - x).abs());
    let eta_base = (dist / 8.0).clamp(ETA_FLOOR, ETA_TOP);
    extrapolated_density_at(sub, atoms, x, eta_base, warm)
}

fn inversion_density(
    sub: &Subordination,
    atoms: &[(f64, f64)],
    support: (f64, f64),
    x: f64,
) -> f64 {
    inversion_density_warm(sub, atoms, support, x, None).0
}

/// Atom-subtracted, Richardson-extrapolated density at a fixed eta ladder.
/// Extrapolation annihilates the linear-in-eta Poisson tail outside the
/// support, which a single-height scan would mistake for mass.
fn extrapolated_density_at(
    sub: &Subordination,
    atoms: &[(f64, f64)],
    x: f64,
    eta_base: f64,
    warm: Option<Complex64>,
) -> (f64, Option<Complex64>) {
    let mut samples = Vec::with_capacity(3);
    let mut w = warm;
    for mult in [4.0, 2.0, 1.0] {
        let eta = mult * eta_base;
        let z = Complex64::new(x, eta);
        if let Ok((g, omega)) = sub.convolved_g(z, w) {
            w = Some(omega);
            let cont = g - crate::measures::spectral::atoms_cauchy(atoms, z);
            samples.push((eta, -cont.im / std::f64::consts::PI));
        }
    }
    if samples.is_empty() {
        (0.0, w)
    } else {
        (quad::extrapolate_to_zero(&samples).max(0.0), w)
    }
}

/// Locate the support of the continuous part inside an a-priori bracket by
/// scanning the extrapolated density and refining each edge by bisection.
/// Multi-band outputs are represented by their convex hull.
fn detect_support(
    sub: &Subordination,
    atoms: &[(f64, f64)],
    bracket: (f64, f64),
) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    let scan_n = 513;
    let eta = 2e-5 * (1.0 + (hi - lo));
    let xs = quad::uniform_grid(lo, hi, scan_n);
    let mut vals = Vec::with_capacity(scan_n);
    let mut warm = None;
    for &x in &xs {
        let (v, w) = extrapolated_density_at(sub, atoms, x, eta, warm);
        warm = w;
        vals.push(v);
    }
    let peak = vals.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 1e-12 {
        return Err(Error::numerical(
            "no continuous part detected in convolution output".to_string(),
            peak,
        ));
    }
    let tau = 1e-6 * peak;
    let first = vals.iter().position(|&v| v > tau).unwrap();
    let last = vals.iter().rposition(|&v| v > tau).unwrap();

    let refine = |mut outside: f64, mut inside: f64| -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (outside + inside);
            let (v, _) = extrapolated_density_at(sub, atoms, mid, eta, None);
            if v > tau {
                inside = mid;
            } else {
                outside = mid;
            }
            if (inside - outside).abs() < 1e-10 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (outside + inside)
    };

    let left = if first == 0 { lo } else { refine(xs[first - 1], xs[first]) };
    let right = if last == scan_n - 1 { hi } else { refine(xs[last + 1], xs[last]) };
    if right <= left {
        return Err(Error::numerical(
            "degenerate support detected in convolution output".to_string(),
            right - left,
        ));
    }
    Ok((left, right))
}

/// Integral over `[x0, x2]` of the quadratic through three samples
/// (Simpson generalized to non-uniform spacing).
fn quadratic_cell(x0: f64, x1: f64, x2: f64, p0: f64, p1: f64, p2: f64) -> f64 {
    let h0 = x1 - x0;
    let h1 = x2 - x1;
    let h = h0 + h1;
    h / 6.0
        * ((2.0 - h1 / h0) * p0 + h * h / (h0 * h1) * p1 + (2.0 - h0 / h1) * p2)
}

/// Build `μ ⊞ ν` with a grid of `grid_n` nodes.
pub(crate) fn convolve_measures(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    grid_n: usize,
) -> Result<SpectralMeasure> {
    // translation by a point mass is exact
    if let Some(a) = mu.as_point_mass() {
        return Ok(nu.shift(a));
    }
    if let Some(b) = nu.as_point_mass() {
        return Ok(mu.shift(b));
    }

    // cap fixed-point nesting: a transform-backed input is replaced by its
    // piecewise-linear grid model before being convolved again
    let mu_flat = flatten_for_input(mu);
    let nu_flat = flatten_for_input(nu);

    let g1 = mu_flat.cauchy_fn();
    let g2 = nu_flat.cauchy_fn();
    let sub = Arc::new(Subordination::new(g1, g2));

    let atoms = convolved_atoms(&mu_flat, &nu_flat);
    let (lo1, hi1) = mu_flat.support_edges();
    let (lo2, hi2) = nu_flat.support_edges();
    let bracket = (lo1 + lo2, hi1 + hi2);
    let support = detect_support(&sub, &atoms, bracket)?;

    // sample the inverted density on a refined clustered grid, warm-starting
    // each fixed point from its neighbour
    let fine = quad::clustered_grid(support.0, support.1, 2 * grid_n.max(64) - 1);
    let mut ps_fine = Vec::with_capacity(fine.len());
    let mut warm = None;
    for &x in &fine {
        let (v, w) = inversion_density_warm(&sub, &atoms, support, x, warm);
        warm = w;
        ps_fine.push(v);
    }

    // per-cell quadratic integration on coarse cells; power-law fits on the
    // edge cells where the density may be singular or steeply vanishing
    let n = grid_n.max(64);
    let mut xs = Vec::with_capacity(n);
    let mut ps = Vec::with_capacity(n);
    for i in 0..n {
        xs.push(fine[2 * i]);
        ps.push(ps_fine[2 * i]);
    }
    let mut cum = vec![0.0; n];
    for i in 1..n {
        let (x0, x1, x2) = (fine[2 * i - 2], fine[2 * i - 1], fine[2 * i]);
        let (p0, p1, p2) = (ps_fine[2 * i - 2], ps_fine[2 * i - 1], ps_fine[2 * i]);
        let cell = if i == 1 {
            edge_cell_mass(support.0, x1, x2, p1, p2)
        } else if i == n - 1 {
            edge_cell_mass(support.1, x1, x0, p1, p0)
        } else {
            quadratic_cell(x0, x1, x2, p0, p1, p2)
        };
        cum[i] = cum[i - 1] + cell.max(0.0);
    }

    // renormalize the grid-limited mass to match the atom bookkeeping
    let atom_mass: f64 = atoms.iter().map(|&(_, m)| m).sum();
    let target = 1.0 - atom_mass;
    let raw = cum[n - 1];
    let mismatch = (raw - target).abs();
    if mismatch > 5e-3 {
        return Err(Error::numerical(
            format!("convolution mass {raw:.6} too far from target {target:.6}"),
            mismatch,
        ));
    }
    let scale = if raw > 0.0 { target / raw } else { 1.0 };
    for p in &mut ps {
        *p *= scale;
    }
    for c in &mut cum {
        *c *= scale;
    }

    let sub_pdf = sub.clone();
    let atoms_pdf = atoms.clone();
    let pdf: PdfFn = Arc::new(move |x: f64| {
        if x < support.0 || x > support.1 {
            0.0
        } else {
            scale * inversion_density(&sub_pdf, &atoms_pdf, support, x)
        }
    });
    let sub_g = sub.clone();
    let cauchy: CauchyFn = Arc::new(move |z: Complex64| {
        match sub_g.convolved_g(z, None) {
            Ok((g, _)) => g,
            Err(_) => Complex64::new(0.0, -f64::MIN_POSITIVE),
        }
    });

    let edges = (
        classify_edge(&xs, &ps, true),
        classify_edge(&xs, &ps, false),
    );
    let cont = ContPart {
        support,
        mass: target,
        edges,
        pdf: Some(pdf),
        cauchy: Some(cauchy),
        moment_route: MomentRoute::Contour,
        xs,
        ps,
        cum,
    };
    SpectralMeasure::from_parts(atoms, cont)
}

/// Mass of the outermost cell `[edge, x_in]` from a local power-law fit
/// `p(x) ≈ C |x - edge|^γ` through the two nearest interior samples, plus
/// the quadratic remainder over the inner half of the cell.
fn edge_cell_mass(edge: f64, x_mid: f64, x_in: f64, p_mid: f64, p_in: f64) -> f64 {
    let d_mid = (x_mid - edge).abs();
    let d_in = (x_in - edge).abs();
    if p_mid <= 0.0 || p_in <= 0.0 || d_mid <= 0.0 {
        // fall back to trapezoid over the whole cell
        return 0.5 * (d_in) * (p_in + p_mid);
    }
    let gamma = ((p_in / p_mid).ln() / (d_in / d_mid).ln()).clamp(-0.95, 4.0);
    // integral of C u^γ from 0 to d_in with C = p_in / d_in^γ
    (p_in * d_in / (gamma + 1.0)).max(0.0)
}

fn classify_edge(xs: &[f64], ps: &[f64], left: bool) -> EdgeKind {
    let (d1, p1, d2, p2) = if left {
        (xs[1] - xs[0], ps[1], xs[2] - xs[0], ps[2])
    } else {
        let n = xs.len();
        (xs[n - 1] - xs[n - 2], ps[n - 2], xs[n - 1] - xs[n - 3], ps[n - 3])
    };
    if p1 <= 0.0 || p2 <= 0.0 || d1 <= 0.0 {
        return EdgeKind::SqrtZero;
    }
    let gamma = (p2 / p1).ln() / (d2 / d1).ln();
    if gamma < -0.15 {
        EdgeKind::InvSqrt
    } else if gamma > 0.15 {
        EdgeKind::SqrtZero
    } else {
        EdgeKind::Smooth
    }
}

/// Transform-backed inputs are reified to their grid model so convolving a
/// convolution output never nests fixed points; large grids are decimated,
/// since every inner fixed-point step pays one transform evaluation per
/// grid cell.
const INPUT_GRID_CAP: usize = 257;

fn flatten_for_input(m: &SpectralMeasure) -> SpectralMeasure {
    match m.cont() {
        Some(c) if c.moment_route == MomentRoute::Contour => {
            if c.xs.len() <= INPUT_GRID_CAP {
                return m.reified();
            }
            let stride = c.xs.len().div_ceil(INPUT_GRID_CAP);
            let mut pairs: Vec<(f64, f64)> = c
                .xs
                .iter()
                .zip(&c.ps)
                .step_by(stride)
                .map(|(&x, &p)| (x, p))
                .collect();
            let last = (*c.xs.last().unwrap(), *c.ps.last().unwrap());
            if pairs.last() != Some(&last) {
                pairs.push(last);
            }
            SpectralMeasure::from_grid(m.atoms().to_vec(), pairs)
                .unwrap_or_else(|_| m.reified())
        }
        _ => m.clone(),
    }
}

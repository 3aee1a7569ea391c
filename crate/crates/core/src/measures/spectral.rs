//! Probability measures on the reals: atoms plus a compactly supported
//! continuous part.
//!
//! A [`SpectralMeasure`] always carries a sampled grid view of its density
//! (the JSON interchange format), and in addition remembers how the density
//! was produced: a closed-form evaluator, a Cauchy transform, or nothing but
//! the grid. Downstream quadrature picks the most accurate route available.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, EdgeKind};

/// Pointwise density evaluator.
pub type PdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Cauchy transform `G(z) = ∫ dμ(x)/(z-x)` of a whole measure (atoms included),
/// defined for `Im z > 0`.
pub type CauchyFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Absolute tolerance on total mass for constructed measures.
pub const MASS_TOL: f64 = 1e-8;
/// Default number of grid nodes for the sampled density view.
pub const DEFAULT_GRID: usize = 4096;

/// How moments of the continuous part should be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRoute {
    /// Adaptive quadrature of the density evaluator.
    Quadrature,
    /// Contour integration of the Cauchy transform (transform-backed measures).
    Contour,
    /// Exact integration of the piecewise-linear grid model.
    PiecewiseLinear,
}

/// Continuous component of a measure.
#[derive(Clone)]
pub struct ContPart {
    pub(crate) support: (f64, f64),
    pub(crate) mass: f64,
    pub(crate) edges: (EdgeKind, EdgeKind),
    pub(crate) pdf: Option<PdfFn>,
    pub(crate) cauchy: Option<CauchyFn>,
    pub(crate) moment_route: MomentRoute,
    pub(crate) xs: Vec<f64>,
    pub(crate) ps: Vec<f64>,
    /// Continuous mass on `[support.0, xs[j]]`, accurate at the nodes.
    pub(crate) cum: Vec<f64>,
}

impl ContPart {
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn moment_route(&self) -> MomentRoute {
        self.moment_route
    }

    pub fn grid(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ps)
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }
}

/// A probability measure: weighted atoms plus an optional continuous part.
#[derive(Clone)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    cont: Option<ContPart>,
}

/// Specification of a continuous part built from a density evaluator.
pub struct ContSpec {
    pub support: (f64, f64),
    pub pdf: PdfFn,
    pub edges: (EdgeKind, EdgeKind),
    pub cauchy: Option<CauchyFn>,
    pub moment_route: MomentRoute,
    pub grid_n: usize,
    /// Rescale the density so that total mass is exactly `1 - atom mass`.
    /// The raw mismatch may not exceed [`ContSpec::NORMALIZE_CAP`].
    pub normalize: bool,
}

impl ContSpec {
    pub const NORMALIZE_CAP: f64 = 5e-3;

    pub fn new(support: (f64, f64), pdf: PdfFn) -> Self {
        ContSpec {
            support,
            pdf,
            edges: (EdgeKind::SqrtZero, EdgeKind::SqrtZero),
            cauchy: None,
            moment_route: MomentRoute::Quadrature,
            grid_n: DEFAULT_GRID,
            normalize: false,
        }
    }
}

impl SpectralMeasure {
    /// The degenerate measure `δ_a`.
    pub fn point_mass(location: f64) -> Self {
        SpectralMeasure {
            atoms: vec![(location, 1.0)],
            cont: None,
        }
    }

    /// A purely atomic measure. Masses must be positive and sum to 1.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = SpectralMeasure { atoms, cont: None };
        m.validate()?;
        Ok(m)
    }

    /// Bernoulli measure `(1-p) δ_0 + p δ_1`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("bernoulli parameter {p} outside [0, 1]")));
        }
        if p == 0.0 {
            Ok(Self::point_mass(0.0))
        } else if p == 1.0 {
            Ok(Self::point_mass(1.0))
        } else {
            Self::from_atoms(vec![(0.0, 1.0 - p), (1.0, p)])
        }
    }

    /// Build a measure from atoms plus a density evaluator.
    ///
    /// The continuous mass is computed by edge-aware adaptive quadrature and
    /// the invariant `atoms + continuous = 1` is enforced to [`MASS_TOL`]
    /// (after the optional renormalization).
    pub fn with_density(mut atoms: Vec<(f64, f64)>, spec: ContSpec) -> Result<Self> {
        let (lo, hi) = spec.support;
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Error::invariant(format!("bad support [{lo}, {hi}]")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let atom_mass: f64 = atoms.iter().map(|&(_, m)| m).sum();

        let raw_pdf = spec.pdf.clone();
        let raw_mass = quad::integrate_edge_aware(&|x| raw_pdf(x), lo, hi, spec.edges, 1e-11);
        let target = 1.0 - atom_mass;
        let mismatch = (raw_mass - target).abs();
        let (pdf, scale): (PdfFn, f64) = if spec.normalize {
            if mismatch > ContSpec::NORMALIZE_CAP {
                return Err(Error::numerical(
                    format!("continuous mass {raw_mass:.6} too far from target {target:.6} to renormalize"),
                    mismatch,
                ));
            }
            let s = target / raw_mass;
            let inner = raw_pdf.clone();
            (Arc::new(move |x| s * inner(x)) as PdfFn, s)
        } else {
            (raw_pdf, 1.0)
        };

        let (xs, ps, cum) = sample_grid(&pdf, lo, hi, spec.edges, spec.grid_n);
        let cont = ContPart {
            support: (lo, hi),
            mass: raw_mass * scale,
            edges: spec.edges,
            pdf: Some(pdf),
            cauchy: spec.cauchy,
            moment_route: spec.moment_route,
            xs,
            ps,
            cum,
        };
        let m = SpectralMeasure {
            atoms,
            cont: Some(cont),
        };
        m.validate()?;
        Ok(m)
    }

    /// Build a measure from sampled density pairs (the interchange format).
    /// The density model is piecewise linear in the given nodes; the grid is
    /// plot-grade, so the total mass is renormalized within a loose cap.
    pub fn from_grid(mut atoms: Vec<(f64, f64)>, mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            if pairs.is_empty() {
                atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
                let m = SpectralMeasure { atoms, cont: None };
                m.validate()?;
                return Ok(m);
            }
            return Err(Error::invariant("density grid needs at least two nodes".to_string()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invariant("density grid abscissas must be strictly increasing".to_string()));
        }
        if pairs.iter().any(|&(_, p)| p < 0.0 || !p.is_finite()) {
            return Err(Error::invariant("density values must be finite and nonnegative".to_string()));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let atom_mass: f64 = atoms.iter().map(|&(_, m)| m).sum();

        let xs: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
        let mut ps: Vec<f64> = pairs.iter().map(|&(_, p)| p).collect();
        let raw: f64 = xs
            .windows(2)
            .zip(ps.windows(2))
            .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
            .sum();
        let target = 1.0 - atom_mass;
        if (raw - target).abs() > ContSpec::NORMALIZE_CAP {
            return Err(Error::invariant(format!(
                "grid density mass {raw:.6} inconsistent with atom mass {atom_mass:.6}"
            )));
        }
        if raw > 0.0 {
            let s = target / raw;
            for p in &mut ps {
                *p *= s;
            }
        }
        let mut cum = Vec::with_capacity(xs.len());
        cum.push(0.0);
        for j in 1..xs.len() {
            let cell = 0.5 * (xs[j] - xs[j - 1]) * (ps[j] + ps[j - 1]);
            cum.push(cum[j - 1] + cell);
        }
        let cont = ContPart {
            support: (xs[0], *xs.last().unwrap()),
            mass: *cum.last().unwrap(),
            edges: (EdgeKind::Smooth, EdgeKind::Smooth),
            pdf: None,
            cauchy: None,
            moment_route: MomentRoute::PiecewiseLinear,
            xs,
            ps,
            cum,
        };
        let m = SpectralMeasure {
            atoms,
            cont: Some(cont),
        };
        m.validate()?;
        Ok(m)
    }

    /// Internal constructor for transform-backed measures whose grid and
    /// cumulative integrals were produced by the inversion pipeline.
    pub(crate) fn from_parts(atoms: Vec<(f64, f64)>, cont: ContPart) -> Result<Self> {
        let m = SpectralMeasure {
            atoms,
            cont: Some(cont),
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        for &(a, m) in &self.atoms {
            if !a.is_finite() {
                return Err(Error::invariant("atom location not finite".to_string()));
            }
            if m.is_nan() || m <= 0.0 || m > 1.0 + MASS_TOL {
                return Err(Error::invariant(format!("atom mass {m} outside (0, 1]")));
            }
        }
        let atom_mass: f64 = self.atoms.iter().map(|&(_, m)| m).sum();
        if atom_mass > 1.0 + MASS_TOL {
            return Err(Error::invariant(format!("atom masses sum to {atom_mass} > 1")));
        }
        let total = atom_mass + self.cont.as_ref().map_or(0.0, |c| c.mass);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::invariant(format!("total mass {total} differs from 1")));
        }
        if let Some(c) = &self.cont {
            if c.ps.iter().any(|&p| p < 0.0 || !p.is_finite()) {
                return Err(Error::invariant("density grid has negative or non-finite values".to_string()));
            }
            if c.xs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::invariant("density grid not strictly increasing".to_string()));
            }
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn cont(&self) -> Option<&ContPart> {
        self.cont.as_ref()
    }

    /// Mass carried by atoms at locations `<= x`.
    pub fn atom_mass_up_to(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|&&(a, _)| a <= x).map(|&(_, m)| m).sum()
    }

    /// Mass of the atom exactly at `x`, if any.
    pub fn atom_mass_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .find(|&&(a, _)| a == x)
            .map_or(0.0, |&(_, m)| m)
    }

    pub fn total_atom_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }

    /// Smallest and largest points of the support (atoms and continuous part).
    pub fn support_edges(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(a, _) in &self.atoms {
            lo = lo.min(a);
            hi = hi.max(a);
        }
        if let Some(c) = &self.cont {
            lo = lo.min(c.support.0);
            hi = hi.max(c.support.1);
        }
        (lo, hi)
    }

    /// Pointwise density of the continuous part (zero outside the support).
    pub fn pdf_at(&self, x: f64) -> f64 {
        match &self.cont {
            None => 0.0,
            Some(c) => {
                if x < c.support.0 || x > c.support.1 {
                    return 0.0;
                }
                match &c.pdf {
                    Some(f) => f(x),
                    None => interp_linear(&c.xs, &c.ps, x),
                }
            }
        }
    }

    /// Continuous mass on `[support_left, x]`.
    pub fn cont_integral_to(&self, x: f64) -> f64 {
        let Some(c) = &self.cont else { return 0.0 };
        if x <= c.support.0 {
            return 0.0;
        }
        if x >= c.support.1 {
            return c.mass;
        }
        let j = match c.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(j) => return c.cum[j],
            Err(0) => {
                // below the first node: only the edge sliver of an offset
                // grid can land here
                let w = c.xs[0] - c.support.0;
                let frac = if w > 0.0 { (x - c.support.0) / w } else { 1.0 };
                return c.cum[0] * frac.clamp(0.0, 1.0);
            }
            Err(j) if j >= c.xs.len() => return c.mass,
            Err(j) => j - 1, // xs[j] < x < xs[j+1]
        };
        let base = c.cum[j];
        match (&c.pdf, c.moment_route) {
            // closed-form densities afford an accurate in-cell correction
            (Some(f), MomentRoute::Quadrature) => {
                if j == 0 && c.edges.0.needs_substitution() {
                    let a = c.support.0;
                    base + quad::integrate_edge_aware(
                        &|t| f(t),
                        a.max(c.xs[j]),
                        x,
                        (c.edges.0, EdgeKind::Smooth),
                        1e-12,
                    )
                } else {
                    base + quad::adaptive_simpson(&|t| f(t), c.xs[j], x, 1e-12)
                }
            }
            // transform-backed or gridded densities: integrate the
            // piecewise-linear grid model exactly (grid-limited accuracy)
            _ => {
                let (x0, x1) = (c.xs[j], c.xs[j + 1]);
                let (p0, p1) = (c.ps[j], c.ps[j + 1]);
                let w = x - x0;
                let slope = (p1 - p0) / (x1 - x0);
                base + p0 * w + 0.5 * slope * w * w
            }
        }
    }

    /// `μ((-inf, x])`: atoms plus continuous mass.
    pub fn cdf_at(&self, x: f64) -> f64 {
        (self.atom_mass_up_to(x) + self.cont_integral_to(x)).min(1.0)
    }

    /// Cauchy transform of the whole measure, if a closed form is attached;
    /// otherwise the exact transform of atoms + piecewise-linear density.
    pub fn cauchy_fn(&self) -> CauchyFn {
        if let Some(c) = &self.cont {
            if let Some(g) = &c.cauchy {
                return g.clone();
            }
            let atoms = self.atoms.clone();
            let xs = c.xs.clone();
            let ps = c.ps.clone();
            Arc::new(move |z| atoms_cauchy(&atoms, z) + grid_cauchy(&xs, &ps, z))
        } else {
            let atoms = self.atoms.clone();
            Arc::new(move |z| atoms_cauchy(&atoms, z))
        }
    }

    /// Replace any transform-backed density by its piecewise-linear grid
    /// model, so that later convolutions do not nest fixed-point solves.
    pub fn reified(&self) -> Self {
        match &self.cont {
            Some(c) if c.cauchy.is_some() || c.pdf.is_some() => {
                let mut c2 = c.clone();
                c2.pdf = None;
                c2.cauchy = None;
                c2.moment_route = MomentRoute::PiecewiseLinear;
                SpectralMeasure {
                    atoms: self.atoms.clone(),
                    cont: Some(c2),
                }
            }
            _ => self.clone(),
        }
    }

    /// Push-forward under `x -> c x` with `c >= 0` (`c = 0` collapses to `δ_0`).
    pub fn scale(&self, c: f64) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::domain(format!("scale factor {c} must be nonnegative")));
        }
        if c == 0.0 {
            return Ok(Self::point_mass(0.0));
        }
        let atoms = self.atoms.iter().map(|&(a, m)| (a * c, m)).collect();
        let cont = self.cont.as_ref().map(|p| {
            let pdf = p.pdf.clone().map(|f| {
                Arc::new(move |x: f64| f(x / c) / c) as PdfFn
            });
            let cauchy = p.cauchy.clone().map(|g| {
                Arc::new(move |z: Complex64| g(z / c) / c) as CauchyFn
            });
            ContPart {
                support: (p.support.0 * c, p.support.1 * c),
                mass: p.mass,
                edges: p.edges,
                pdf,
                cauchy,
                moment_route: p.moment_route,
                xs: p.xs.iter().map(|&x| x * c).collect(),
                ps: p.ps.iter().map(|&v| v / c).collect(),
                cum: p.cum.clone(),
            }
        });
        Ok(SpectralMeasure { atoms, cont })
    }

    /// Push-forward under `x -> x + s`.
    pub fn shift(&self, s: f64) -> Self {
        let atoms = self.atoms.iter().map(|&(a, m)| (a + s, m)).collect();
        let cont = self.cont.as_ref().map(|p| {
            let pdf = p.pdf.clone().map(|f| {
                Arc::new(move |x: f64| f(x - s)) as PdfFn
            });
            let cauchy = p.cauchy.clone().map(|g| {
                Arc::new(move |z: Complex64| g(z - s)) as CauchyFn
            });
            ContPart {
                support: (p.support.0 + s, p.support.1 + s),
                mass: p.mass,
                edges: p.edges,
                pdf,
                cauchy,
                moment_route: p.moment_route,
                xs: p.xs.iter().map(|&x| x + s).collect(),
                ps: p.ps.clone(),
                cum: p.cum.clone(),
            }
        });
        SpectralMeasure { atoms, cont }
    }

    /// True when the measure is a single atom.
    pub fn as_point_mass(&self) -> Option<f64> {
        if self.cont.is_none() && self.atoms.len() == 1 {
            Some(self.atoms[0].0)
        } else {
            None
        }
    }
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("SpectralMeasure");
        d.field("atoms", &self.atoms);
        if let Some(c) = &self.cont {
            d.field("support", &c.support)
                .field("cont_mass", &c.mass)
                .field("grid_n", &c.xs.len())
                .field("moment_route", &c.moment_route);
        }
        d.finish()
    }
}

/// Sample a density on a clustered grid and accumulate per-cell integrals.
/// Edge cells use the `x = edge ± u^2` substitution; interior cells use
/// Simpson on the cell.
fn sample_grid(
    pdf: &PdfFn,
    lo: f64,
    hi: f64,
    edges: (EdgeKind, EdgeKind),
    n: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut xs = quad::clustered_grid(lo, hi, n.max(8));
    // a singular endpoint cannot be evaluated exactly at the edge
    if edges.0 == EdgeKind::InvSqrt {
        xs[0] = lo + (xs[1] - lo) * 1e-6;
    }
    if edges.1 == EdgeKind::InvSqrt {
        let last = xs.len() - 1;
        xs[last] = hi - (hi - xs[last - 1]) * 1e-6;
    }
    let ps: Vec<f64> = xs.iter().map(|&x| pdf(x).max(0.0)).collect();
    let mut cum = Vec::with_capacity(xs.len());
    cum.push(if edges.0.needs_substitution() {
        quad::integrate_edge_aware(&|x| pdf(x), lo, xs[0], (edges.0, EdgeKind::Smooth), 1e-13)
    } else {
        0.0
    });
    let last = xs.len() - 1;
    for j in 1..xs.len() {
        let (x0, x1) = (xs[j - 1], xs[j]);
        let cell = if j == 1 && edges.0.needs_substitution() {
            quad::integrate_edge_aware(&|x| pdf(x), x0, x1, (edges.0, EdgeKind::Smooth), 1e-12)
        } else if j == last && edges.1.needs_substitution() {
            quad::integrate_edge_aware(&|x| pdf(x), x0, x1, (EdgeKind::Smooth, edges.1), 1e-12)
        } else {
            let m = 0.5 * (x0 + x1);
            (x1 - x0) / 6.0 * (ps[j - 1] + 4.0 * pdf(m) + ps[j])
        };
        cum.push(cum[j - 1] + cell);
    }
    // the top node of an inverse-sqrt right edge leaves a sliver uncovered
    if edges.1 == EdgeKind::InvSqrt {
        let sliver = quad::integrate_edge_aware(
            &|x| pdf(x),
            xs[last],
            hi,
            (EdgeKind::Smooth, edges.1),
            1e-13,
        );
        cum[last] += sliver;
    }
    (xs, ps, cum)
}

pub(crate) fn interp_linear(xs: &[f64], ps: &[f64], x: f64) -> f64 {
    match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(j) => ps[j],
        Err(0) => ps[0],
        Err(j) if j == xs.len() => ps[xs.len() - 1],
        Err(j) => {
            let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
            ps[j - 1] + t * (ps[j] - ps[j - 1])
        }
    }
}

/// Exact Cauchy transform of a finite atomic measure.
pub(crate) fn atoms_cauchy(atoms: &[(f64, f64)], z: Complex64) -> Complex64 {
    let mut g = Complex64::new(0.0, 0.0);
    for &(a, m) in atoms {
        g += m / (z - a);
    }
    g
}

/// Exact Cauchy transform of the piecewise-linear density model on the grid.
pub(crate) fn grid_cauchy(xs: &[f64], ps: &[f64], z: Complex64) -> Complex64 {
    let mut g = Complex64::new(0.0, 0.0);
    for j in 1..xs.len() {
        let (x0, x1) = (xs[j - 1], xs[j]);
        let (p0, p1) = (ps[j - 1], ps[j]);
        let slope = (p1 - p0) / (x1 - x0);
        let a = p0 + slope * (z - x0);
        g += a * ((z - x0) / (z - x1)).ln() - (p1 - p0);
    }
    g
}

impl Serialize for SpectralMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SpectralMeasure", 3)?;
        let atoms: Vec<[f64; 2]> = self.atoms.iter().map(|&(a, m)| [a, m]).collect();
        s.serialize_field("atoms", &atoms)?;
        match &self.cont {
            Some(c) => {
                s.serialize_field("support", &[c.support.0, c.support.1])?;
                let density: Vec<[f64; 2]> =
                    c.xs.iter().zip(&c.ps).map(|(&x, &p)| [x, p]).collect();
                s.serialize_field("density", &density)?;
            }
            None => {
                s.serialize_field("support", &Option::<[f64; 2]>::None)?;
                s.serialize_field("density", &Vec::<[f64; 2]>::new())?;
            }
        }
        s.end()
    }
}

#[derive(Deserialize)]
struct MeasureWire {
    atoms: Vec<[f64; 2]>,
    #[serde(default)]
    #[allow(dead_code)]
    support: Option<[f64; 2]>,
    #[serde(default)]
    density: Vec<[f64; 2]>,
}

impl<'de> Deserialize<'de> for SpectralMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MeasureWire::deserialize(deserializer)?;
        let atoms = wire.atoms.iter().map(|&[a, m]| (a, m)).collect();
        let pairs = wire.density.iter().map(|&[x, p]| (x, p)).collect();
        SpectralMeasure::from_grid(atoms, pairs).map_err(de::Error::custom)
    }
}

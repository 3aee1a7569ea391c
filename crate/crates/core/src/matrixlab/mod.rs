//! Random-matrix verification laboratory.
//!
//! Families of independently Haar-rotated Hermitian matrices serve as the
//! finite-dimensional surrogate for free independence: sums of their
//! spectral projections reproduce free Poisson spectra, free order
//! statistics appear as kernel dimensions, and the Weyl / Lévy-norm
//! operator inequalities can be checked exactly.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremes::{BaseDistribution, NormalizationSchedule};
use crate::measures::cdf::Cdf;
use crate::measures::levy::levy_distance;

pub type HMatrix = DMatrix<Complex<f64>>;

/// Configuration of a matrix ensemble. The seed fully determines every
/// sample: matrix `i` draws from an independent stream `i + 1` of a
/// counter-based generator seeded with `seed`.
#[derive(Clone)]
pub struct EnsembleConfig {
    pub dim: usize,
    pub count: usize,
    pub base: BaseDistribution,
    pub schedule: Option<NormalizationSchedule>,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn new(dim: usize, count: usize, base: BaseDistribution, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::domain(format!("ensemble dimension {dim} must be >= 2")));
        }
        if count < 1 {
            return Err(Error::domain("ensemble count must be >= 1".to_string()));
        }
        Ok(EnsembleConfig { dim, count, base, schedule: None, seed })
    }

    fn stream_rng(&self, index: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(index + 1);
        rng
    }
}

/// Sorted (descending) eigenvalues of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSpectrum {
    pub eigenvalues: Vec<f64>,
}

impl EmpiricalSpectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::domain("spectrum must be non-empty".to_string()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::invariant("eigenvalues must be finite".to_string()));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(EmpiricalSpectrum { eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalue function `θ(t)`: the `⌊t d⌋`-th largest eigenvalue.
    pub fn theta(&self, t: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::domain(format!("theta argument {t} outside [0, 1)")));
        }
        let j = ((t * self.dim() as f64).floor() as usize).min(self.dim() - 1);
        Ok(self.eigenvalues[j])
    }
}

/// Step CDF with jumps `1/d` at the eigenvalues.
pub fn empirical_cdf(spec: &EmpiricalSpectrum) -> Cdf {
    let d = spec.dim() as f64;
    let steps: Vec<(f64, f64)> = spec.eigenvalues.iter().rev().map(|&x| (x, 1.0 / d)).collect();
    Cdf::from_steps(steps).expect("spectrum masses always sum to 1")
}

/// Complex Ginibre matrix with independent standard normal entries.
fn ginibre(dim: usize, rng: &mut ChaCha12Rng) -> HMatrix {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// R diagonal absorbed into Q.
pub fn haar_unitary(dim: usize, rng: &mut ChaCha12Rng) -> HMatrix {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Sample the family `X_i = U_i D_i U_i^*`, `i = 1..count`, with
/// independent Haar unitaries `U_i` and i.i.d. diagonal draws from the
/// base distribution.
pub fn sample_free_family(cfg: &EnsembleConfig) -> Result<Vec<HMatrix>> {
    let results: Vec<Result<HMatrix>> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = cfg.stream_rng(i as u64);
            let d = cfg.dim;
            let mut diag = DVector::<f64>::zeros(d);
            for v in diag.iter_mut() {
                // open-interval uniform keeps quantiles finite
                let u = (rng.gen::<u64>() as f64 + 0.5) / (u64::MAX as f64 + 1.0);
                *v = cfg.base.quantile(u)?;
            }
            let u = haar_unitary(d, &mut rng);
            let mut x = HMatrix::zeros(d, d);
            for j in 0..d {
                let col = u.column(j);
                let w = diag[j];
                // X += w * col col^*
                for a in 0..d {
                    let ca = col[a] * w;
                    for b in 0..d {
                        x[(a, b)] += ca * col[b].conj();
                    }
                }
            }
            // enforce exact Hermitian symmetry against rounding
            let xh = x.adjoint();
            Ok((x + xh).scale(0.5))
        })
        .collect();
    results.into_iter().collect()
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_spectrum(x: &HMatrix) -> Result<EmpiricalSpectrum> {
    check_hermitian(x)?;
    let eig = x.clone().symmetric_eigen();
    EmpiricalSpectrum::new(eig.eigenvalues.iter().cloned().collect())
}

/// Operator norm (largest absolute eigenvalue) of a Hermitian matrix.
pub fn operator_norm(x: &HMatrix) -> Result<f64> {
    let spec = hermitian_spectrum(x)?;
    Ok(spec
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs())))
}

fn check_hermitian(x: &HMatrix) -> Result<()> {
    if x.nrows() != x.ncols() {
        return Err(Error::Dimension { expected: x.nrows(), got: x.ncols() });
    }
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    let dev = (x - x.adjoint()).iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    if dev > 1e-8 * (1.0 + scale) {
        return Err(Error::domain(format!("matrix is not Hermitian (deviation {dev:.3e})")));
    }
    Ok(())
}

/// Orthogonal projection onto the span of eigenvectors with eigenvalue
/// greater than `t`.
pub fn spectral_projection(x: &HMatrix, t: f64) -> Result<HMatrix> {
    check_hermitian(x)?;
    let d = x.nrows();
    let eig = x.clone().symmetric_eigen();
    let mut p = HMatrix::zeros(d, d);
    for j in 0..d {
        if eig.eigenvalues[j] > t {
            let col = eig.eigenvectors.column(j);
            for a in 0..d {
                let ca = col[a];
                for b in 0..d {
                    p[(a, b)] += ca * col[b].conj();
                }
            }
        }
    }
    let ph = p.adjoint();
    Ok((p + ph).scale(0.5))
}

/// Eigendecompositions of a matrix family, computed once and reused for
/// repeated functional calculus (for example sweeping thresholds `t`).
pub struct DecomposedFamily {
    dim: usize,
    members: Vec<(HMatrix, Vec<f64>)>,
}

impl DecomposedFamily {
    pub fn new(family: &[HMatrix]) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::domain("point process needs at least one matrix".to_string()));
        }
        let dim = family[0].nrows();
        let members: Vec<Result<(HMatrix, Vec<f64>)>> = family
            .par_iter()
            .map(|x| {
                if x.nrows() != dim {
                    return Err(Error::Dimension { expected: dim, got: x.nrows() });
                }
                check_hermitian(x)?;
                let eig = x.clone().symmetric_eigen();
                Ok((eig.eigenvectors, eig.eigenvalues.iter().cloned().collect()))
            })
            .collect();
        let members = members.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(DecomposedFamily { dim, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `Σ_i f(X_i)` assembled from the stored decompositions.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> HMatrix {
        let d = self.dim;
        let mut total = HMatrix::zeros(d, d);
        for (vectors, values) in &self.members {
            for (j, &value) in values.iter().enumerate() {
                let w = f(value);
                if w == 0.0 {
                    continue;
                }
                let col = vectors.column(j);
                for a in 0..d {
                    let ca = col[a] * w;
                    for b in 0..d {
                        total[(a, b)] += ca * col[b].conj();
                    }
                }
            }
        }
        let th = total.adjoint();
        (total + th).scale(0.5)
    }

    /// The spectral projection `1_{(t, inf)}(X_i)` of a single member.
    pub fn member_projection(&self, i: usize, t: f64) -> HMatrix {
        let d = self.dim;
        let (vectors, values) = &self.members[i];
        let mut p = HMatrix::zeros(d, d);
        for (j, &value) in values.iter().enumerate() {
            if value > t {
                let col = vectors.column(j);
                for a in 0..d {
                    let ca = col[a];
                    for b in 0..d {
                        p[(a, b)] += ca * col[b].conj();
                    }
                }
            }
        }
        let ph = p.adjoint();
        (p + ph).scale(0.5)
    }
}

/// `⟨family, f⟩ = Σ_i f(X_i)` by functional calculus on each matrix.
pub fn point_process_apply<F>(f: F, family: &[HMatrix]) -> Result<HMatrix>
where
    F: Fn(f64) -> f64 + Sync,
{
    Ok(DecomposedFamily::new(family)?.apply(f))
}

/// Normalized dimension of the intersection of the kernels of a family of
/// projections: `dim(∩ ker P_i) / d`, computed from the spectrum of `Σ P_i`
/// with a relative rank tolerance of `1e-8`.
pub fn nullspace_intersection_dim(projections: &[HMatrix]) -> Result<f64> {
    if projections.is_empty() {
        return Err(Error::domain("need at least one projection".to_string()));
    }
    let d = projections[0].nrows();
    let mut s = HMatrix::zeros(d, d);
    for p in projections {
        if p.nrows() != d || p.ncols() != d {
            return Err(Error::Dimension { expected: d, got: p.nrows() });
        }
        s += p;
    }
    let spec = hermitian_spectrum(&s)?;
    let top = spec.eigenvalues[0].max(0.0);
    let tol = 1e-8 * top.max(1.0);
    let kernel = spec.eigenvalues.iter().filter(|&&v| v.abs() <= tol).count();
    Ok(kernel as f64 / d as f64)
}

/// Serializable ensemble descriptor used in exported reports.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleDescriptor {
    pub dim: usize,
    pub count: usize,
    pub base: crate::extremes::BaseFamily,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn descriptor(&self) -> EnsembleDescriptor {
        EnsembleDescriptor {
            dim: self.dim,
            count: self.count,
            base: self.base.family(),
            seed: self.seed,
        }
    }
}

/// Distances between an empirical spectrum and a reference law.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMetrics {
    pub levy: f64,
    pub sup_dist: f64,
    pub violations: usize,
}

/// Exportable record of one spectral experiment:
/// `{config, eigenvalues, metrics: {levy, sup_dist, violations}}`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub config: EnsembleDescriptor,
    pub eigenvalues: Vec<f64>,
    pub metrics: SpectrumMetrics,
}

impl SpectrumReport {
    /// Compare a spectrum against a reference CDF. A violation is counted
    /// when the Lévy distance reaches `levy_bound`.
    pub fn against(
        config: EnsembleDescriptor,
        spec: &EmpiricalSpectrum,
        reference: &Cdf,
        levy_bound: f64,
    ) -> Self {
        let emp = empirical_cdf(spec);
        let levy = levy_distance(&emp, reference);
        let sup_dist = spec
            .eigenvalues
            .iter()
            .map(|&x| (emp.eval(x) - reference.eval(x)).abs())
            .fold(0.0f64, f64::max);
        let violations = usize::from(levy >= levy_bound);
        SpectrumReport {
            config,
            eigenvalues: spec.eigenvalues.clone(),
            metrics: SpectrumMetrics { levy, sup_dist, violations },
        }
    }
}

/// Result of checking the Weyl eigenvalue-function inequalities
/// `θ_A(t) <= θ_{A+B}(t) <= θ_A(t) + ‖B‖` on the grid `t = j/d`.
#[derive(Debug, Clone, Serialize)]
pub struct WeylReport {
    pub violations: usize,
    pub min_lower_margin: f64,
    pub min_upper_margin: f64,
    pub norm_b: f64,
}

impl WeylReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Check the Weyl inequalities for Hermitian `A` and PSD `B`.
pub fn verify_weyl(a: &HMatrix, b: &HMatrix) -> Result<WeylReport> {
    let spec_b = hermitian_spectrum(b)?;
    let d = spec_b.dim();
    let min_b = *spec_b.eigenvalues.last().unwrap();
    let norm_b = spec_b.eigenvalues[0].abs().max(min_b.abs());
    if min_b < -1e-10 * (1.0 + norm_b) {
        return Err(Error::domain(format!("B is not positive semidefinite (min eigenvalue {min_b:.3e})")));
    }
    let spec_a = hermitian_spectrum(a)?;
    let spec_ab = hermitian_spectrum(&(a + b))?;
    if spec_a.dim() != d {
        return Err(Error::Dimension { expected: d, got: spec_a.dim() });
    }
    let scale = 1.0 + operator_norm(a)? + norm_b;
    let tol = 1e-9 * scale;
    let mut violations = 0usize;
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    // the eigenvalue function evaluated at t = j/d (right limits) and at
    // t = j/d - 0 (left limits) together sweep both eigenvalue lists
    for j in 0..d {
        let lower = spec_ab.eigenvalues[j] - spec_a.eigenvalues[j];
        let upper = spec_a.eigenvalues[j] + norm_b - spec_ab.eigenvalues[j];
        min_lower = min_lower.min(lower);
        min_upper = min_upper.min(upper);
        if lower < -tol || upper < -tol {
            violations += 1;
        }
    }
    Ok(WeylReport { violations, min_lower_margin: min_lower, min_upper_margin: min_upper, norm_b })
}

/// Result of checking `d_L(F_A, F_B) <= ‖B - A‖` for `B - A >= 0`.
#[derive(Debug, Clone, Serialize)]
pub struct LevyNormReport {
    pub levy: f64,
    pub norm_diff: f64,
    pub holds: bool,
}

/// Check the Lévy-distance/operator-norm inequality for Hermitian `A`, `B`
/// with `B - A` positive semidefinite.
pub fn verify_levy_norm(a: &HMatrix, b: &HMatrix) -> Result<LevyNormReport> {
    let diff = b - a;
    let spec_diff = hermitian_spectrum(&diff)?;
    let min = *spec_diff.eigenvalues.last().unwrap();
    let norm_diff = spec_diff.eigenvalues[0].abs().max(min.abs());
    if min < -1e-10 * (1.0 + norm_diff) {
        return Err(Error::domain(format!("B - A is not positive semidefinite (min eigenvalue {min:.3e})")));
    }
    let fa = empirical_cdf(&hermitian_spectrum(a)?);
    let fb = empirical_cdf(&hermitian_spectrum(b)?);
    let levy = levy_distance(&fa, &fb);
    Ok(LevyNormReport { levy, norm_diff, holds: levy <= norm_diff + 1e-6 })
}

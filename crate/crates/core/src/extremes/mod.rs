//! Extreme-value machinery: base distributions with their norming
//! constants, finite-n free order statistics, and the limit laws for free
//! order statistics.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::freeconv::free_binomial_cdf;
use crate::measures::cdf::Cdf;
use crate::measures::laws::{EvtLaw, LawFamily};
use crate::measures::poisson::{free_poisson_edges, free_poisson_pdf};
use crate::quad::{self, EdgeKind};

/// Built-in base distribution families (plus user-supplied CDFs).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum BaseFamily {
    /// `F(x) = 1 - x^{-alpha}` for `x >= 1`.
    Pareto { alpha: f64 },
    /// `F(x) = 1 - e^{-x}` for `x >= 0`.
    Exponential,
    /// Uniform on `[0, 1]`.
    Uniform01,
    /// User-supplied distribution function.
    User,
}

/// A sampling/base distribution together with its CDF.
#[derive(Debug, Clone)]
pub struct BaseDistribution {
    family: BaseFamily,
    cdf: Cdf,
}

impl BaseDistribution {
    pub fn pareto(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::domain(format!("Pareto exponent {alpha} must be positive")));
        }
        let cdf = Cdf::from_rule(
            Arc::new(move |x: f64| if x < 1.0 { 0.0 } else { 1.0 - x.powf(-alpha) }),
            (1.0, f64::INFINITY),
        );
        Ok(BaseDistribution { family: BaseFamily::Pareto { alpha }, cdf })
    }

    pub fn exponential() -> Self {
        let cdf = Cdf::from_rule(
            Arc::new(|x: f64| if x < 0.0 { 0.0 } else { 1.0 - (-x).exp() }),
            (0.0, f64::INFINITY),
        );
        BaseDistribution { family: BaseFamily::Exponential, cdf }
    }

    pub fn uniform01() -> Self {
        let cdf = Cdf::from_rule(Arc::new(|x: f64| x.clamp(0.0, 1.0)), (0.0, 1.0));
        BaseDistribution { family: BaseFamily::Uniform01, cdf }
    }

    /// A user-supplied distribution; norming constants must then be supplied
    /// by the caller as well.
    pub fn from_cdf(cdf: Cdf) -> Self {
        BaseDistribution { family: BaseFamily::User, cdf }
    }

    pub fn from_family(family: BaseFamily) -> Result<Self> {
        match family {
            BaseFamily::Pareto { alpha } => Self::pareto(alpha),
            BaseFamily::Exponential => Ok(Self::exponential()),
            BaseFamily::Uniform01 => Ok(Self::uniform01()),
            BaseFamily::User => Err(Error::domain(
                "user base distributions need an explicit CDF".to_string(),
            )),
        }
    }

    pub fn family(&self) -> BaseFamily {
        self.family
    }

    pub fn cdf(&self) -> &Cdf {
        &self.cdf
    }

    /// Quantile sampling hook used by the matrix laboratory.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        match self.family {
            BaseFamily::Pareto { alpha } => {
                if q.is_nan() || q <= 0.0 || q >= 1.0 {
                    return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
                }
                Ok((1.0 - q).powf(-1.0 / alpha))
            }
            BaseFamily::Exponential => {
                if q.is_nan() || q <= 0.0 || q >= 1.0 {
                    return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
                }
                Ok(-(1.0 - q).ln())
            }
            BaseFamily::Uniform01 => {
                if q.is_nan() || q <= 0.0 || q >= 1.0 {
                    return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
                }
                Ok(q)
            }
            BaseFamily::User => self.cdf.quantile(q),
        }
    }
}

/// The norming constants `a_n > 0`, `b_n`.
#[derive(Clone)]
pub struct NormalizationSchedule {
    a: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    b: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl NormalizationSchedule {
    pub fn new(
        a: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
        b: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    ) -> Self {
        NormalizationSchedule { a, b }
    }

    /// `a_n = 1`, `b_n = 0`.
    pub fn identity() -> Self {
        NormalizationSchedule {
            a: Arc::new(|_| 1.0),
            b: Arc::new(|_| 0.0),
        }
    }

    pub fn a(&self, n: u64) -> Result<f64> {
        let v = (self.a)(n);
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::invariant(format!("a_{n} = {v} must be positive")));
        }
        Ok(v)
    }

    pub fn b(&self, n: u64) -> f64 {
        (self.b)(n)
    }
}

impl std::fmt::Debug for NormalizationSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NormalizationSchedule(a_2={}, b_2={})", (self.a)(2), (self.b)(2))
    }
}

/// Norming constants under which `n (1 - F(a_n x + b_n))` converges to the
/// tail intensity of the target law:
///
/// - Pareto(α) with the Fréchet(α) law: `a_n = n^{1/α}`, `b_n = 0`
/// - Exponential with the Gumbel law: `a_n = 1`, `b_n = log n`
/// - Uniform on [0,1] with the Weibull(1) law: `a_n = 1/n`, `b_n = 1`
pub fn norming_constants(base: &BaseDistribution, law: &EvtLaw) -> Result<NormalizationSchedule> {
    match (base.family(), law.family()) {
        (BaseFamily::Pareto { alpha }, LawFamily::Frechet) => {
            if (alpha - law.alpha()).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "Pareto exponent {alpha} does not match Frechet shape {}",
                    law.alpha()
                )));
            }
            Ok(NormalizationSchedule::new(
                Arc::new(move |n| (n as f64).powf(1.0 / alpha)),
                Arc::new(|_| 0.0),
            ))
        }
        (BaseFamily::Exponential, LawFamily::Gumbel) => Ok(NormalizationSchedule::new(
            Arc::new(|_| 1.0),
            Arc::new(|n| (n as f64).ln()),
        )),
        (BaseFamily::Uniform01, LawFamily::Weibull) => {
            if (law.alpha() - 1.0).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "uniform base attracts Weibull(1), not Weibull({})",
                    law.alpha()
                )));
            }
            Ok(NormalizationSchedule::new(
                Arc::new(|n| 1.0 / n as f64),
                Arc::new(|_| 1.0),
            ))
        }
        (BaseFamily::User, _) => Err(Error::domain(
            "user base distributions must supply their own normalization schedule".to_string(),
        )),
        (b, l) => Err(Error::domain(format!("base {b:?} is not in the domain of attraction of {l:?}"))),
    }
}

/// Finite-n distribution of the k-th free order statistic:
/// the free binomial CDF at `k` with head probability
/// `p = 1 - F(a_n t + b_n)`.
pub fn finite_free_order_cdf(
    base: &BaseDistribution,
    sched: &NormalizationSchedule,
    n: u64,
    k: f64,
    t: f64,
) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("order statistics need n >= 1".to_string()));
    }
    if k < 0.0 {
        return Err(Error::domain(format!("order index k = {k} must be nonnegative")));
    }
    let a = sched.a(n)?;
    let x = a * t + sched.b(n);
    let p = (1.0 - base.cdf().eval(x)).clamp(0.0, 1.0);
    free_binomial_cdf(n, p, k)
}

/// Distribution of the normalized free maximum: the `k = 0` order
/// statistic, which reduces to `max(n F(a_n t + b_n) - (n - 1), 0)`.
pub fn free_max_cdf(
    base: &BaseDistribution,
    sched: &NormalizationSchedule,
    n: u64,
    t: f64,
) -> Result<f64> {
    finite_free_order_cdf(base, sched, n, 0.0, t)
}

/// The three thresholds of the limit law for order index `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub t_minus: f64,
    pub t_zero: f64,
    pub t_plus: f64,
}

/// A query into the limit law: order index, evaluation point, thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderQuery {
    pub k: f64,
    pub t: f64,
    pub thresholds: Thresholds,
}

impl OrderQuery {
    pub fn new(law: &EvtLaw, k: f64, t: f64) -> Result<Self> {
        Ok(OrderQuery { k, t, thresholds: order_thresholds(law, k)? })
    }
}

/// Threshold points `t_- = G^{(-1)}(exp[-(1+√k)^2])`, `t_0 = G^{(-1)}(1/e)`,
/// `t_+ = G^{(-1)}(exp[-(1-√k)^2])`.
///
/// At `k = 1` the upper level `exp[-(1-√k)^2]` equals 1 and `t_+` is the
/// right endpoint of the law by convention. For `k > 4` the level
/// `(1-√k)^2` exceeds 1 and `t_+` drops below `t_0`; the piecewise limit
/// formula remains consistent there because its middle branch already
/// saturates at 1.
pub fn order_thresholds(law: &EvtLaw, k: f64) -> Result<Thresholds> {
    if k < 0.0 {
        return Err(Error::domain(format!("order index k = {k} must be nonnegative")));
    }
    let sk = k.sqrt();
    let q_minus = (-(1.0 + sk) * (1.0 + sk)).exp();
    let q_plus = (-(1.0 - sk) * (1.0 - sk)).exp();
    let t_minus = law.quantile(q_minus)?;
    let t_zero = law.quantile(1.0 / std::f64::consts::E)?;
    let t_plus = if q_plus >= 1.0 {
        law.support_right()
    } else {
        law.quantile(q_plus)?
    };
    Ok(Thresholds { t_minus, t_zero, t_plus })
}

/// `∫_{(1-√λ)^2}^{min(k, (1+√λ)^2)} p_λ(ξ) dξ`: the continuous head mass of
/// the free Poisson law with intensity `λ`, empty when `k` is below the
/// lower edge.
fn poisson_head_integral(lambda: f64, k: f64) -> f64 {
    let (lo, hi) = free_poisson_edges(lambda);
    let upper = k.min(hi);
    if upper <= lo {
        return 0.0;
    }
    let left_edge = if lo <= 1e-12 * hi { EdgeKind::InvSqrt } else { EdgeKind::SqrtZero };
    let right_edge = if upper >= hi - 1e-12 * hi { EdgeKind::SqrtZero } else { EdgeKind::Smooth };
    quad::integrate_edge_aware(
        &|x| free_poisson_pdf(lambda, x),
        lo,
        upper,
        (left_edge, right_edge),
        1e-11,
    )
}

/// Limit distribution of the k-th free order statistic, as the piecewise
/// formula in `t` with thresholds `t_-, t_0, t_+`:
///
/// ```text
/// 0                                 t < t_-
/// ∫_{(1-√λ(t))^2}^{k} p_t           t in [t_-, t_0]
/// 1 - λ(t) + ∫_{(1-√λ(t))^2}^{k} p_t    t in (t_0, t_+]
/// 1 - λ(t) 1_{[0,1)}(k)             t > t_+
/// ```
///
/// where `λ(t)` is the tail intensity and `p_t` the free Poisson density of
/// intensity `λ(t)`. This must agree with the free Poisson CDF
/// `H_{λ(t)}(k)` everywhere.
pub fn limit_free_order_cdf(law: &EvtLaw, k: f64, t: f64) -> Result<f64> {
    let th = order_thresholds(law, k)?;
    let lambda = law.tail_intensity(t);
    if t < th.t_minus {
        return Ok(0.0);
    }
    if t <= th.t_zero {
        return Ok(poisson_head_integral(lambda, k));
    }
    if t <= th.t_plus {
        return Ok(1.0 - lambda + poisson_head_integral(lambda, k));
    }
    // beyond t_+ only the atom is missing for k < 1
    if k < 1.0 {
        Ok(1.0 - lambda)
    } else {
        Ok(1.0)
    }
}

/// Classical limit of the k-th order statistic:
/// `G_(k)(t) = sum_{j=0}^{k} e^{-λ(t)} λ(t)^j / j!`.
pub fn classical_order_limit(law: &EvtLaw, k: u32, t: f64) -> f64 {
    let lambda = law.tail_intensity(t);
    if lambda.is_infinite() {
        return 0.0;
    }
    if lambda == 0.0 {
        return 1.0;
    }
    let mut term = (-lambda).exp();
    let mut total = term;
    for j in 1..=k {
        term *= lambda / j as f64;
        total += term;
    }
    total.min(1.0)
}

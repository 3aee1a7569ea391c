//! Distribution functions: step functions, measure-backed CDFs, and
//! closed-form rules, with a shared generalized inverse.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::spectral::SpectralMeasure;

pub type RuleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    /// Sorted jump locations with masses summing to 1.
    Steps(Vec<(f64, f64)>),
    Measure(Box<SpectralMeasure>),
    Rule {
        eval: RuleFn,
        /// `(inf{x : F(x) > 0}, sup{x : F(x) < 1})`, extended reals allowed.
        support: (f64, f64),
    },
}

/// A right-continuous distribution function with limits 0 and 1.
#[derive(Clone)]
pub struct Cdf {
    repr: Repr,
}

impl Cdf {
    /// Step CDF with jumps `mass_i` at `loc_i`. Masses must be positive and
    /// sum to 1 within 1e-9.
    pub fn from_steps(mut steps: Vec<(f64, f64)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invariant("step CDF needs at least one jump".to_string()));
        }
        steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = steps.iter().map(|&(_, m)| m).sum();
        if (total - 1.0).abs() > 1e-9 || steps.iter().any(|&(_, m)| m <= 0.0) {
            return Err(Error::invariant(format!("step masses must be positive and sum to 1, got {total}")));
        }
        Ok(Cdf { repr: Repr::Steps(steps) })
    }

    pub fn from_measure(m: SpectralMeasure) -> Self {
        Cdf { repr: Repr::Measure(Box::new(m)) }
    }

    /// Closed-form rule. The caller guarantees monotonicity and limits; the
    /// support hints bound the quantile search.
    pub fn from_rule(eval: RuleFn, support: (f64, f64)) -> Self {
        Cdf { repr: Repr::Rule { eval, support } }
    }

    /// Degenerate CDF jumping at `a`.
    pub fn step_at(a: f64) -> Self {
        Cdf { repr: Repr::Steps(vec![(a, 1.0)]) }
    }

    /// `F(x)`, right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Steps(steps) => steps.iter().take_while(|&&(a, _)| a <= x).map(|&(_, m)| m).sum(),
            Repr::Measure(m) => m.cdf_at(x),
            Repr::Rule { eval, .. } => eval(x).clamp(0.0, 1.0),
        }
    }

    /// Left limit `F(x-)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Steps(steps) => steps.iter().take_while(|&&(a, _)| a < x).map(|&(_, m)| m).sum(),
            Repr::Measure(m) => {
                let atom = m.atom_mass_at(x);
                (m.cdf_at(x) - atom).max(0.0)
            }
            Repr::Rule { eval, .. } => {
                let h = 1e-12 * (1.0 + x.abs());
                eval(x - h).clamp(0.0, 1.0)
            }
        }
    }

    /// `inf{x : F(x) > 0}` (the lower endpoint of the support).
    pub fn support_left(&self) -> f64 {
        match &self.repr {
            Repr::Steps(steps) => steps[0].0,
            Repr::Measure(m) => m.support_edges().0,
            Repr::Rule { support, .. } => support.0,
        }
    }

    /// `sup{x : F(x) < 1}` (the upper endpoint of the support).
    pub fn support_right(&self) -> f64 {
        match &self.repr {
            Repr::Steps(steps) => steps[steps.len() - 1].0,
            Repr::Measure(m) => m.support_edges().1,
            Repr::Rule { support, .. } => support.1,
        }
    }

    /// Generalized inverse `inf{x : F(x) >= q}` for `q` in `(0, 1]`;
    /// `q = 1` returns the right support endpoint. Bisection is run to an
    /// absolute width of `1e-12` times the bracket scale.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q <= 0.0 || q > 1.0 {
            return Err(Error::domain(format!("quantile level {q} outside (0, 1]")));
        }
        match &self.repr {
            Repr::Steps(steps) => {
                let mut acc = 0.0;
                for &(a, m) in steps {
                    acc += m;
                    if acc >= q - 1e-15 {
                        return Ok(a);
                    }
                }
                Ok(steps[steps.len() - 1].0)
            }
            _ => {
                if q == 1.0 {
                    let r = self.support_right();
                    return Ok(r);
                }
                let (mut lo, mut hi) = self.quantile_bracket(q)?;
                // invariant: F(lo) < q <= F(hi)
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if hi - lo <= 1e-12 * (1.0 + lo.abs() + hi.abs()) {
                        break;
                    }
                    if self.eval(mid) >= q {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
        }
    }

    fn quantile_bracket(&self, q: f64) -> Result<(f64, f64)> {
        let l = self.support_left();
        let r = self.support_right();
        let (mut lo, mut hi);
        if l.is_finite() {
            lo = l - 1e-9 * (1.0 + l.abs());
        } else {
            lo = -1.0;
            let mut w = 1.0;
            while self.eval(lo) >= q {
                w *= 4.0;
                lo = -w;
                if w > 1e18 {
                    return Err(Error::numerical("quantile bracket expansion failed below".to_string(), q));
                }
            }
        }
        if r.is_finite() {
            hi = r;
        } else {
            hi = 1.0;
            let mut w = 1.0;
            while self.eval(hi) < q {
                w *= 4.0;
                hi = w;
                if w > 1e18 {
                    return Err(Error::numerical("quantile bracket expansion failed above".to_string(), q));
                }
            }
        }
        if self.eval(lo) >= q {
            // the support hint was tight; nudge left
            lo = l - 1.0;
        }
        Ok((lo, hi))
    }

    /// Candidate abscissas where this CDF changes character: jump locations
    /// and density-grid nodes, or a sampled fill for closed-form rules.
    pub fn breakpoints(&self, fill: usize) -> Vec<f64> {
        match &self.repr {
            Repr::Steps(steps) => steps.iter().map(|&(a, _)| a).collect(),
            Repr::Measure(m) => {
                let mut out: Vec<f64> = m.atoms().iter().map(|&(a, _)| a).collect();
                if let Some(c) = m.cont() {
                    out.extend_from_slice(&c.xs);
                }
                out
            }
            Repr::Rule { support, .. } => {
                let lo = if support.0.is_finite() { support.0 } else { self.quantile(1e-6).unwrap_or(-1e6) };
                let hi = if support.1.is_finite() { support.1 } else { self.quantile(1.0 - 1e-6).unwrap_or(1e6) };
                let n = fill.max(16);
                (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect()
            }
        }
    }
}

impl std::fmt::Debug for Cdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::Steps(s) => write!(f, "Cdf::Steps({} jumps)", s.len()),
            Repr::Measure(m) => write!(f, "Cdf::Measure({m:?})"),
            Repr::Rule { support, .. } => write!(f, "Cdf::Rule(support {support:?})"),
        }
    }
}

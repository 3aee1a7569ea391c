//! The classical and free extremal laws.
//!
//! Classical (types I, II, III = Gumbel, Fréchet, Weibull):
//!
//! ```text
//! I:   G(x) = exp(-e^{-x})                      on R
//! II:  G(x) = exp(-x^{-α}) for x > 0, else 0    (α > 0)
//! III: G(x) = exp(-(-x)^α) for x <= 0, else 1   (α > 0)
//! ```
//!
//! Free analogues:
//!
//! ```text
//! I:   G'(x) = (1 - e^{-x})_+
//! II:  G'(x) = (1 - x^{-α}) for x > 1, else 0
//! III: G'(x) = 1 - (-x)^α on (-1, 0], 0 below, 1 above
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::cdf::Cdf;

/// The three extremal families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawFamily {
    /// Type I.
    Gumbel,
    /// Type II, shape `alpha > 0`.
    Frechet,
    /// Type III, shape `alpha > 0` (upper-bounded support).
    Weibull,
}

/// A classical extreme value law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvtLaw {
    family: LawFamily,
    alpha: f64,
}

/// A free extreme value law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEvtLaw {
    family: LawFamily,
    alpha: f64,
}

fn check_alpha(family: LawFamily, alpha: f64) -> Result<f64> {
    match family {
        LawFamily::Gumbel => Ok(1.0), // shape is irrelevant
        _ => {
            if alpha.is_finite() && alpha > 0.0 {
                Ok(alpha)
            } else {
                Err(Error::domain(format!("shape alpha = {alpha} must be positive")))
            }
        }
    }
}

impl EvtLaw {
    pub fn new(family: LawFamily, alpha: f64) -> Result<Self> {
        Ok(EvtLaw { family, alpha: check_alpha(family, alpha)? })
    }

    pub fn gumbel() -> Self {
        EvtLaw { family: LawFamily::Gumbel, alpha: 1.0 }
    }

    pub fn frechet(alpha: f64) -> Result<Self> {
        Self::new(LawFamily::Frechet, alpha)
    }

    pub fn weibull(alpha: f64) -> Result<Self> {
        Self::new(LawFamily::Weibull, alpha)
    }

    pub fn family(&self) -> LawFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `G(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.family {
            LawFamily::Gumbel => (-(-x).exp()).exp(),
            LawFamily::Frechet => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-x.powf(-self.alpha)).exp()
                }
            }
            LawFamily::Weibull => {
                if x > 0.0 {
                    1.0
                } else {
                    (-(-x).powf(self.alpha)).exp()
                }
            }
        }
    }

    /// Functional inverse `G^{(-1)}(q)` on `(0, 1)`, exact per family.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q <= 0.0 || q >= 1.0 {
            return Err(Error::domain(format!("quantile level {q} outside (0, 1)")));
        }
        let l = -q.ln(); // in (0, inf)
        Ok(match self.family {
            LawFamily::Gumbel => -l.ln(),
            LawFamily::Frechet => l.powf(-1.0 / self.alpha),
            LawFamily::Weibull => -l.powf(1.0 / self.alpha),
        })
    }

    /// Tail intensity `λ(t) = -log G(t)`, `+inf` at and below the lower
    /// support endpoint.
    pub fn tail_intensity(&self, t: f64) -> f64 {
        match self.family {
            LawFamily::Gumbel => (-t).exp(),
            LawFamily::Frechet => {
                if t <= 0.0 {
                    f64::INFINITY
                } else {
                    t.powf(-self.alpha)
                }
            }
            LawFamily::Weibull => {
                if t > 0.0 {
                    0.0
                } else {
                    (-t).powf(self.alpha)
                }
            }
        }
    }

    /// `inf{x : G(x) > 0}`.
    pub fn support_left(&self) -> f64 {
        match self.family {
            LawFamily::Frechet => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    /// `sup{x : G(x) < 1}` (where the law reaches 1).
    pub fn support_right(&self) -> f64 {
        match self.family {
            LawFamily::Weibull => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// The law as a [`Cdf`] rule.
    pub fn cdf_fn(&self) -> Cdf {
        let law = *self;
        Cdf::from_rule(
            Arc::new(move |x| law.cdf(x)),
            (law.support_left(), law.support_right()),
        )
    }

    /// The free law of the same type and shape.
    pub fn free(&self) -> FreeEvtLaw {
        FreeEvtLaw { family: self.family, alpha: self.alpha }
    }
}

impl FreeEvtLaw {
    pub fn new(family: LawFamily, alpha: f64) -> Result<Self> {
        Ok(FreeEvtLaw { family, alpha: check_alpha(family, alpha)? })
    }

    pub fn family(&self) -> LawFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `G^free(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.family {
            LawFamily::Gumbel => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-x).exp()
                }
            }
            LawFamily::Frechet => {
                if x <= 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-self.alpha)
                }
            }
            LawFamily::Weibull => {
                if x <= -1.0 {
                    0.0
                } else if x <= 0.0 {
                    1.0 - (-x).powf(self.alpha)
                } else {
                    1.0
                }
            }
        }
    }

    pub fn cdf_fn(&self) -> Cdf {
        let law = *self;
        let support = match self.family {
            LawFamily::Gumbel => (0.0, f64::INFINITY),
            LawFamily::Frechet => (1.0, f64::INFINITY),
            LawFamily::Weibull => (-1.0, 0.0),
        };
        Cdf::from_rule(Arc::new(move |x| law.cdf(x)), support)
    }
}

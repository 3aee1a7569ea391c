//! Cauchy transforms on a horizontal contour.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::spectral::CauchyFn;

/// Values of a Cauchy transform along the contour `Im z = eta`.
///
/// The transform of a probability measure maps the upper half plane into
/// the lower one, so every stored value must have negative imaginary part.
#[derive(Debug, Clone)]
pub struct CauchyGrid {
    pub eta: f64,
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CauchyGrid {
    pub fn evaluate(g: &CauchyFn, xs: Vec<f64>, eta: f64) -> Result<Self> {
        if eta.is_nan() || eta <= 0.0 {
            return Err(Error::domain(format!("contour height {eta} must be positive")));
        }
        let values: Vec<Complex64> = xs.iter().map(|&x| g(Complex64::new(x, eta))).collect();
        let grid = CauchyGrid { eta, xs, values };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        for (&x, v) in self.xs.iter().zip(&self.values) {
            if v.im.is_nan() || v.im >= 0.0 {
                return Err(Error::invariant(format!(
                    "Cauchy transform value at x = {x} has Im = {} >= 0",
                    v.im
                )));
            }
        }
        Ok(())
    }

    /// Stieltjes inversion at the contour height: `-Im G / pi`.
    pub fn density_estimate(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| (-v.im / std::f64::consts::PI).max(0.0))
            .collect()
    }
}

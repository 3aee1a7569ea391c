//! Lévy distance between distribution functions and the eigenvalue function
//! (decreasing rearrangement) of a spectral distribution.

use crate::error::{Error, Result};
use crate::measures::cdf::Cdf;

/// Lévy distance
/// `d_L(F, G) = sup_x inf{s >= 0 : G(x-s) - s <= F(x) <= G(x+s) + s}`.
///
/// Computed by bisection on `s`, with the corridor condition checked at the
/// breakpoints of both inputs (and their `±s` translates, using one-sided
/// limits). For step CDFs this is exact; for gridded CDFs the result is
/// accurate to about one grid cell.
pub fn levy_distance(f: &Cdf, g: &Cdf) -> f64 {
    let bp_f = f.breakpoints(2048);
    let bp_g = g.breakpoints(2048);

    // the distance never exceeds 1, and never exceeds the horizontal span
    let mut hi: f64 = 1.0;
    let mut lo = 0.0;
    if corridor_holds(f, g, &bp_f, &bp_g, 0.0) {
        return 0.0;
    }
    for _ in 0..60 {
        let s = 0.5 * (lo + hi);
        if corridor_holds(f, g, &bp_f, &bp_g, s) {
            hi = s;
        } else {
            lo = s;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    hi
}

/// Check `G(x-s) - s <= F(x) <= G(x+s) + s` for all real `x`.
///
/// Both conditions are monotone-piecewise, so it is enough to test at the
/// jump/grid points of `F` directly and at the translated jump/grid points
/// of `G` from the left.
fn corridor_holds(f: &Cdf, g: &Cdf, bp_f: &[f64], bp_g: &[f64], s: f64) -> bool {
    let tol = 1e-12;
    // upper side: F(x) <= G(x+s) + s
    for &x in bp_f {
        if f.eval(x) > g.eval(x + s) + s + tol {
            return false;
        }
    }
    for &c in bp_g {
        // just left of x = c - s the value G(x+s) is still G(c-)
        let x = c - s;
        if f.eval_left(x) > g.eval_left(c) + s + tol {
            return false;
        }
    }
    // lower side: G(x-s) - s <= F(x)
    for &c in bp_g {
        let x = c + s;
        if g.eval(c) - s > f.eval(x) + tol {
            return false;
        }
    }
    for &x in bp_f {
        // just left of a jump of F the lower bound uses G((x-s)-)
        if g.eval_left(x - s) - s > f.eval_left(x) + tol {
            return false;
        }
    }
    true
}

/// Eigenvalue function `θ_F(t) = inf{x : F(x) >= 1 - t}` for `t` in `[0, 1)`.
///
/// Non-increasing and right-continuous in `t`; at `t = 0` it returns the
/// upper endpoint of the support.
pub fn eigenvalue_function(f: &Cdf, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::domain(format!("eigenvalue function argument {t} outside [0, 1)")));
    }
    f.quantile(1.0 - t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    #[test]
    fn identical_inputs_have_zero_distance() {
        let f = Cdf::from_steps(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(levy_distance(&f, &f), 0.0);
    }

    #[test]
    fn step_vs_shifted_step() {
        // d_L(δ_0, δ_a) = min(a, 1)
        for a in [0.25, 0.5, 0.9, 2.0] {
            let f = Cdf::step_at(0.0);
            let g = Cdf::step_at(a);
            assert_abs_diff_eq!(levy_distance(&f, &g), a.min(1.0), epsilon = 1e-9);
            assert_abs_diff_eq!(levy_distance(&g, &f), a.min(1.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn metric_axioms_on_step_cdfs() {
        let cdfs = [
            Cdf::from_steps(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap(),
            Cdf::from_steps(vec![(0.2, 0.3), (0.8, 0.7)]).unwrap(),
            Cdf::from_steps(vec![(-0.5, 0.2), (0.5, 0.4), (1.5, 0.4)]).unwrap(),
        ];
        for (i, f) in cdfs.iter().enumerate() {
            for (j, g) in cdfs.iter().enumerate() {
                let d_fg = levy_distance(f, g);
                let d_gf = levy_distance(g, f);
                assert_abs_diff_eq!(d_fg, d_gf, epsilon = 1e-9);
                if i == j {
                    assert!(d_fg < 1e-12);
                } else {
                    assert!(d_fg > 0.0);
                }
                for h in &cdfs {
                    let d_fh = levy_distance(f, h);
                    let d_hg = levy_distance(h, g);
                    assert!(d_fg <= d_fh + d_hg + 1e-9);
                }
            }
        }
    }

    /// Independent oracle for the geometric characterization: complete both
    /// graphs across jumps, then take the maximal gap between them along the
    /// south-east to north-west direction and divide by sqrt(2). Each
    /// anti-diagonal `x + y = c` meets a completed monotone staircase exactly
    /// once; two intersection points at signed positions `a`, `b` along the
    /// line are `sqrt(2) |a - b|` apart, so the result is `max |a - b|`.
    fn completed_graph_levy(steps_f: &[(f64, f64)], steps_g: &[(f64, f64)]) -> f64 {
        // parametrize the completed graph by arc points (x, y)
        fn polyline(steps: &[(f64, f64)]) -> Vec<(f64, f64)> {
            let span = 4.0;
            let mut pts = vec![(steps[0].0 - span, 0.0)];
            let mut y = 0.0;
            for &(x, m) in steps {
                pts.push((x, y));
                y += m;
                pts.push((x, y));
            }
            pts.push((steps[steps.len() - 1].0 + span, 1.0));
            pts
        }
        // distance in the (rotated) direction u = (x + y)/sqrt(2): for each
        // anti-diagonal line x + y = c, measure the gap between the two
        // curves along it.
        let pf = polyline(steps_f);
        let pg = polyline(steps_g);
        let proj = |pts: &[(f64, f64)], c: f64| -> Option<f64> {
            // intersection of the polyline with x + y = c, reported as the
            // signed coordinate (x - y)/2 along the line
            for w in pts.windows(2) {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                let c0 = x0 + y0;
                let c1 = x1 + y1;
                if (c0 - c) * (c1 - c) <= 0.0 && (c1 - c0).abs() > 0.0 {
                    let t = (c - c0) / (c1 - c0);
                    let x = x0 + t * (x1 - x0);
                    let y = y0 + t * (y1 - y0);
                    return Some(0.5 * (x - y));
                }
            }
            None
        };
        let lo = pf[0].0.min(pg[0].0);
        let hi = pf[pf.len() - 1].0.max(pg[pg.len() - 1].0) + 1.0;
        let mut dmax: f64 = 0.0;
        let n = 4000;
        for j in 0..=n {
            let c = lo + (hi - lo) * j as f64 / n as f64;
            if let (Some(a), Some(b)) = (proj(&pf, c), proj(&pg, c)) {
                dmax = dmax.max((a - b).abs());
            }
        }
        dmax
    }

    #[test]
    fn geometric_characterization_agrees() {
        let pairs = [
            (vec![(0.0, 1.0)], vec![(0.6, 1.0)]),
            (vec![(0.0, 0.5), (1.0, 0.5)], vec![(0.3, 1.0)]),
            (vec![(0.0, 0.25), (0.5, 0.75)], vec![(-0.2, 0.6), (0.9, 0.4)]),
        ];
        for (sf, sg) in pairs {
            let f = Cdf::from_steps(sf.clone()).unwrap();
            let g = Cdf::from_steps(sg.clone()).unwrap();
            let corridor = levy_distance(&f, &g);
            let geometric = completed_graph_levy(&sf, &sg);
            assert_abs_diff_eq!(corridor, geometric, epsilon = 2e-3);
        }
    }

    #[test]
    fn eigenvalue_function_point_mass_and_uniform() {
        let f = Cdf::step_at(1.5);
        for t in [0.0, 0.3, 0.99] {
            assert_eq!(eigenvalue_function(&f, t).unwrap(), 1.5);
        }
        let u = Cdf::from_rule(Arc::new(|x: f64| x.clamp(0.0, 1.0)), (0.0, 1.0));
        for t in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(eigenvalue_function(&u, t).unwrap(), 1.0 - t, epsilon = 1e-9);
        }
        assert!(eigenvalue_function(&u, 1.0).is_err());
        assert!(eigenvalue_function(&u, -0.1).is_err());
    }

    #[test]
    fn eigenvalue_function_empirical_three_points() {
        let f = Cdf::from_steps(vec![(1.0, 1.0 / 3.0), (2.0, 1.0 / 3.0), (3.0, 1.0 / 3.0)]).unwrap();
        for (t, want) in [
            (0.0, 3.0),
            (0.2, 3.0),
            (1.0 / 3.0, 2.0),
            (0.5, 2.0),
            (2.0 / 3.0, 1.0),
            (0.9, 1.0),
        ] {
            assert_eq!(eigenvalue_function(&f, t).unwrap(), want, "t={t}");
        }
    }

    #[test]
    fn eigenvalue_function_is_monotone_on_measures() {
        let m = crate::measures::poisson::free_poisson(0.5).unwrap();
        let f = Cdf::from_measure(m);
        let mut last = f64::INFINITY;
        for j in 0..100 {
            let t = j as f64 / 100.0;
            let v = eigenvalue_function(&f, t).unwrap();
            assert!(v <= last + 1e-9);
            last = v;
        }
    }
}

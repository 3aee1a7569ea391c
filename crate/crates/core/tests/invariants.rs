//! Property tests for the structural invariants: transform round trips,
//! metric axioms, and monotonicity of the distribution functions.

use fevt::measures::{eigenvalue_function, levy_distance, Cdf, EvtLaw};
use fevt::{
    cumulants_to_moments, free_binomial_cdf, free_poisson_cdf, moments_to_cumulants,
    FreeCumulantSeq,
};
use proptest::prelude::*;

/// Everything is immutable after construction and shares freely across
/// threads.
#[test]
fn core_types_are_send_and_sync() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<fevt::SpectralMeasure>();
    assert_send_sync::<Cdf>();
    assert_send_sync::<EvtLaw>();
    assert_send_sync::<fevt::FreeEvtLaw>();
    assert_send_sync::<fevt::extremes::BaseDistribution>();
    assert_send_sync::<fevt::extremes::NormalizationSchedule>();
    assert_send_sync::<fevt::MomentSeq>();
    assert_send_sync::<fevt::SizedPoissonFamily>();
}

/// The limit law runs from 0 at the lower support endpoint to 1 at the
/// upper one, including through the k < 1 plateau.
#[test]
fn limit_law_attains_its_limits() {
    use fevt::limit_free_order_cdf;
    for k in [0.0, 0.5, 1.0, 3.0] {
        let frechet = EvtLaw::frechet(1.0).unwrap();
        assert_eq!(limit_free_order_cdf(&frechet, k, 1e-6).unwrap(), 0.0);
        assert!(limit_free_order_cdf(&frechet, k, 1e12).unwrap() > 1.0 - 1e-10);
        let gumbel = EvtLaw::gumbel();
        assert!(limit_free_order_cdf(&gumbel, k, -40.0).unwrap() == 0.0);
        assert!(limit_free_order_cdf(&gumbel, k, 40.0).unwrap() > 1.0 - 1e-12);
        let weibull = EvtLaw::weibull(2.0).unwrap();
        assert_eq!(limit_free_order_cdf(&weibull, k, -50.0).unwrap(), 0.0);
        assert_eq!(limit_free_order_cdf(&weibull, k, 1.0).unwrap(), 1.0);
    }
}

fn step_cdf_strategy() -> impl Strategy<Value = Cdf> {
    proptest::collection::vec((-3.0f64..3.0, 0.05f64..1.0), 1..6).prop_map(|mut pts| {
        let total: f64 = pts.iter().map(|&(_, m)| m).sum();
        for p in &mut pts {
            p.1 /= total;
        }
        Cdf::from_steps(pts).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    // cumulants of unit size: larger values at high order push the moments
    // past 1e6 and the inverse recursion into round-off amplification
    #[test]
    fn cumulant_moment_round_trip(kappa in proptest::collection::vec(-1.0f64..1.0, 1..9)) {
        let seq = FreeCumulantSeq::new(kappa.clone()).unwrap();
        let m = cumulants_to_moments(&seq);
        let back = moments_to_cumulants(&m);
        for (a, b) in kappa.iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn levy_metric_axioms(f in step_cdf_strategy(), g in step_cdf_strategy(), h in step_cdf_strategy()) {
        let d_fg = levy_distance(&f, &g);
        let d_gf = levy_distance(&g, &f);
        prop_assert!((d_fg - d_gf).abs() < 1e-9);
        prop_assert!(levy_distance(&f, &f) < 1e-12);
        let d_fh = levy_distance(&f, &h);
        let d_hg = levy_distance(&h, &g);
        prop_assert!(d_fg <= d_fh + d_hg + 1e-9);
    }

    #[test]
    fn eigenvalue_function_is_non_increasing(f in step_cdf_strategy(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        prop_assume!(t1 < 1.0 && t2 < 1.0);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = eigenvalue_function(&f, lo).unwrap();
        let b = eigenvalue_function(&f, hi).unwrap();
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn free_poisson_cdf_monotone_in_k(lambda in 0.01f64..3.0, k1 in -0.5f64..5.0, k2 in -0.5f64..5.0) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let a = free_poisson_cdf(lambda, lo).unwrap();
        let b = free_poisson_cdf(lambda, hi).unwrap();
        prop_assert!(a <= b + 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn free_binomial_cdf_monotone_in_t_argument(n in 1u64..40, p1 in 0.0f64..1.0, p2 in 0.0f64..1.0, k in 0.0f64..8.0) {
        // raising the head probability lowers the CDF (more mass escapes
        // above k), matching monotonicity of the order statistic in t
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let a = free_binomial_cdf(n, lo, k).unwrap();
        let b = free_binomial_cdf(n, hi, k).unwrap();
        prop_assert!(b <= a + 1e-9, "n={} p {}<{} k={}: {} vs {}", n, lo, hi, k, a, b);
    }

    #[test]
    fn quantile_inverts_law_cdf(alpha in 0.2f64..4.0, q in 0.001f64..0.999) {
        for law in [EvtLaw::gumbel(), EvtLaw::frechet(alpha).unwrap(), EvtLaw::weibull(alpha).unwrap()] {
            let x = law.quantile(q).unwrap();
            prop_assert!((law.cdf(x) - q).abs() < 1e-10);
        }
    }
}

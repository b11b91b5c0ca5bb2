use proptest::prelude::*;
use trendstat::arima::{ar_filter, fit_arima};
use trendstat::sim::{draw_noise, NoiseSpec};
use trendstat::{k_statistic, run_test_pipeline, simulate_dgp, DgpConfig, TrendSpec, UnitRoot};

fn ar1_path(theta: f64, rho: UnitRoot, d: usize, sigma_eta: f64, kappa_zero: bool, seed: u64) -> Vec<f64> {
    let mut cfg = DgpConfig::simple(2000, rho, d, sigma_eta, seed, 0);
    cfg.theta = vec![theta];
    if !kappa_zero {
        cfg.kappa_zero = false;
        cfg.alpha = vec![2.0, -1.0];
    }
    simulate_dgp(&cfg).unwrap().values
}

#[test]
fn theta_is_consistent_under_the_null() {
    for seed in 0..5 {
        let y = ar1_path(0.5, UnitRoot::Plus, 0, 0.0, true, 100 + seed);
        let fit = fit_arima(&y, 1, TrendSpec::none(), UnitRoot::Plus).unwrap();
        assert!((fit.theta_check[0] - 0.5).abs() < 0.1, "seed {seed}: {:?}", fit);
        assert!(fit.converged);
        assert!(fit.beta_check < -0.9, "overdifferenced MA root near -1: {}", fit.beta_check);
    }
}

#[test]
fn theta_is_consistent_under_the_alternative() {
    for seed in 0..5 {
        // a negative AR root keeps the reduced-form MA factor well away from cancelling it
        let y = ar1_path(-0.5, UnitRoot::Plus, 1, 1.0, false, 200 + seed);
        let fit = fit_arima(&y, 1, TrendSpec::poly(1), UnitRoot::Plus).unwrap();
        assert!((fit.theta_check[0] + 0.5).abs() < 0.1, "seed {seed}: {:?}", fit);
        assert!(fit.beta_check > -1.0 && fit.beta_check < 1.0);
    }
}

#[test]
fn moving_average_coefficient_is_recovered() {
    // y = cumsum(ξ_t + 0.4 ξ_{t-1}) + 1 + 3 t/T: differencing leaves MA(1) plus a constant
    for seed in 0..3 {
        let xi = draw_noise(&NoiseSpec::gaussian(1.0, 300 + seed, 0), 2000);
        let mut y = Vec::with_capacity(2000);
        let mut level = 0.0;
        for t in 0..2000 {
            level += xi[t] + if t > 0 { 0.4 * xi[t - 1] } else { 0.0 };
            y.push(level + 1.0 + 3.0 * (t + 1) as f64 / 2000.0);
        }
        let fit = fit_arima(&y, 0, TrendSpec::poly(1), UnitRoot::Plus).unwrap();
        assert!((fit.beta_check - 0.4).abs() < 0.1, "seed {seed}: {}", fit.beta_check);
        assert!((fit.sigma_xi2 - 1.0).abs() < 0.15);
    }
}

#[test]
fn css_never_increases_along_iterations() {
    let y = ar1_path(0.5, UnitRoot::Plus, 1, 0.5, true, 9);
    let fit = fit_arima(&y, 2, TrendSpec::none(), UnitRoot::Plus).unwrap();
    assert!(!fit.css_history.is_empty());
    assert!(fit.css_history.windows(2).all(|w| w[1] <= w[0]));
    assert!(fit.css <= fit.css_history[0]);
}

#[test]
fn pipeline_without_ar_or_trend_is_the_raw_statistic() {
    for seed in 0..10 {
        let y = simulate_dgp(&DgpConfig::simple(300, UnitRoot::Plus, 1, 1.0, seed, 1)).unwrap().values;
        let (stat, fit) = run_test_pipeline(&y, 0, TrendSpec::none()).unwrap();
        assert!(fit.arima.is_none());
        assert_eq!(fit.filtered, y);
        assert_eq!(stat, k_statistic(&y).unwrap());
    }
}

#[test]
fn pipeline_with_ar_filters_before_detrending() {
    let y = ar1_path(0.5, UnitRoot::Plus, 0, 0.0, false, 44);
    let (stat, fit) = run_test_pipeline(&y, 1, TrendSpec::poly(1)).unwrap();
    let theta = fit.arima.as_ref().unwrap().theta_check.clone();
    assert_eq!(fit.filtered, ar_filter(&y, &theta));
    assert!(stat.k_hat > 0.0 && stat.k_hat < 1.0, "{}", stat.k_hat);
}

proptest! {
    #[test]
    fn ar_filter_is_linear(
        pair in (1usize..60).prop_flat_map(|n| (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )),
        theta in prop::collection::vec(-1.0f64..1.0, 0..4),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let (y1, y2) = pair;
        let combo: Vec<f64> = y1.iter().zip(&y2).map(|(u, v)| a * u + b * v).collect();
        let lhs = ar_filter(&combo, &theta);
        let f1 = ar_filter(&y1, &theta);
        let f2 = ar_filter(&y2, &theta);
        for ((l, u), v) in lhs.iter().zip(&f1).zip(&f2) {
            prop_assert!((l - (a * u + b * v)).abs() < 1e-9);
        }
    }
}

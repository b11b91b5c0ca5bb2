mod common;

use proptest::prelude::*;
use trendstat::sim::{draw_noise, integrated_walk, random_walk, simulate_dgp, DgpConfig, NoiseSpec, UnitRoot};

use common::slope_t;

proptest! {
    #[test]
    fn integration_composes(eta in prop::collection::vec(-10.0f64..10.0, 1..60), d in 2usize..5) {
        let direct = integrated_walk(&eta, d).unwrap();
        let stepwise = integrated_walk(&integrated_walk(&eta, d - 1).unwrap(), 1).unwrap();
        prop_assert_eq!(direct, stepwise);
    }

    #[test]
    fn single_integration_is_the_positive_walk(eta in prop::collection::vec(-10.0f64..10.0, 1..60)) {
        prop_assert_eq!(integrated_walk(&eta, 1).unwrap(), random_walk(&eta, UnitRoot::Plus));
    }

    #[test]
    fn negative_walk_compensates(eta in prop::collection::vec(-50i32..50, 2..80)) {
        // integer-valued draws keep every sum exact
        let eta: Vec<f64> = eta.into_iter().map(f64::from).collect();
        let s = random_walk(&eta, UnitRoot::Minus);
        let mut running = 0.0;
        for t in 1..=s.len() {
            running += s[t - 1];
            let expected: f64 = if t % 2 == 0 {
                (1..=t / 2).map(|k| eta[2 * k - 1]).sum()
            } else {
                (1..=t.div_ceil(2)).map(|k| eta[2 * k - 2]).sum()
            };
            prop_assert_eq!(running, expected);
        }
    }
}

#[test]
fn compensation_on_gaussian_paths() {
    let eta = draw_noise(&NoiseSpec::gaussian(1.0, 77, 1), 1000);
    let s = random_walk(&eta, UnitRoot::Minus);
    let mut running = 0.0;
    for t in 1..=1000 {
        running += s[t - 1];
        if t % 2 == 0 {
            let expected: f64 = (1..=t / 2).map(|k| eta[2 * k - 1]).sum();
            assert!((running - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn simulation_is_a_pure_function_of_the_config() {
    let mut cfg = DgpConfig::simple(300, UnitRoot::Minus, 1, 1.0, 12, 3);
    cfg.theta = vec![0.3, -0.2];
    cfg.kappa_zero = false;
    cfg.alpha = vec![1.0, -2.0, 0.5];
    assert_eq!(simulate_dgp(&cfg).unwrap(), simulate_dgp(&cfg).unwrap());
}

/// Cross-sectional variance of `Y_t` over `n` paths, for every `t`.
fn variance_profile(rho: UnitRoot, d: usize, sigma_eta: f64, len: usize, n: u64) -> Vec<f64> {
    let paths: Vec<Vec<f64>> =
        (0..n).map(|i| simulate_dgp(&DgpConfig::simple(len, rho, d, sigma_eta, 5, i)).unwrap().values).collect();
    (0..len)
        .map(|t| {
            let m = paths.iter().map(|p| p[t]).sum::<f64>() / n as f64;
            paths.iter().map(|p| (p[t] - m).powi(2)).sum::<f64>() / (n as f64 - 1.0)
        })
        .collect()
}

#[test]
fn negative_root_variance_grows_linearly() {
    // V(Y_t) = σ_ε² + σ_η² t: block averages of the variance profile
    let profile = variance_profile(UnitRoot::Minus, 1, 1.0, 300, 200);
    let blocks: Vec<f64> = profile.chunks(30).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let idx: Vec<f64> = (0..blocks.len()).map(|i| i as f64).collect();
    let (slope, t) = slope_t(&idx, &blocks);
    assert!(slope > 0.0 && t > 5.0, "slope {slope}, t {t}");
    // one block spans 30 steps, so the slope should be near 30
    assert!((slope - 30.0).abs() < 10.0, "slope {slope}");
}

#[test]
fn null_variance_is_flat() {
    let profile = variance_profile(UnitRoot::Plus, 0, 0.0, 300, 200);
    let idx: Vec<f64> = (0..300).map(|i| i as f64).collect();
    let (_, t) = slope_t(&idx, &profile);
    assert!(t.abs() < 3.0, "t {t}");
}

//! Stationarity against integration in autoregressive processes with a
//! polynomial trend.
//!
//! The crate computes the Leybourne–McCabe type statistic
//! `K̂_T = Σ S_t² / (T Q_T)` on residuals of an AR-filtered, detrended
//! series, samples its limiting laws under the null and under unit-root
//! alternatives, and applies either the classic upper-tail rule or a
//! two-sided rule that also detects walks with a unit root at −1.
//!
//! ```no_run
//! use trendstat::{decide, run_test_pipeline, FunctionalId, Rule, TableCache, TableKey, TrendSpec};
//! use trendstat::parallel::Execution;
//!
//! let y: Vec<f64> = (0..300).map(|t| (t as f64 * 0.7).sin()).collect();
//! let trend = TrendSpec::poly(1);
//! let (stat, _fit) = run_test_pipeline(&y, 0, trend).unwrap();
//! let key = TableKey { id: FunctionalId::h0(trend), grid: 2000, n_rep: 50_000, seed: 1 };
//! let (table, _) = TableCache::from_env().get_or_build(&key, Execution::Parallel).unwrap();
//! let report = decide(stat.k_hat, trend, &table, Rule::Corrected, 0.05).unwrap();
//! println!("reject: {}", report.reject);
//! ```

pub mod arima;
pub mod decision;
pub mod error;
pub mod kstat;
pub mod limit;
pub mod optim;
pub mod parallel;
pub mod rng;
pub mod series;
pub mod sim;
pub mod trend;

pub use arima::{ar_filter, difference, fit_arima, long_run_variance, ArimaFit, LongRunVariance};
pub use decision::{approximate_p_value, decide, Direction, PValue, Rule, TestReport};
pub use error::{Error, Result};
pub use kstat::{
    k_statistic, kpss_statistic, partial_sums, run_kpss_pipeline, run_test_pipeline, FitResult, StatResult,
};
pub use limit::{
    build_table, lookup, sample_h0_functional, sample_h1_plus_functional, sample_negative_root_law,
    sample_prop1_functional, FunctionalId, FunctionalSampler, Hypothesis, QuantileTable, TableCache, TableKey,
};
pub use series::TimeSeries;
pub use sim::{draw_noise, integrated_walk, random_walk, simulate_dgp, DgpConfig, NoiseSpec, UnitRoot};
pub use trend::{design_matrix, hilbert_limit, ols_fit, OlsFit, TrendSpec};

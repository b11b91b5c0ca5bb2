//! Partial sums of residuals and the statistic `K̂_T = Σ S_t² / (T Q_T)`.

use serde::{Deserialize, Serialize};

use crate::arima::{
    ar_filter, default_bandwidth, fit_arima_with, long_run_variance, ArimaFit, CssOptions, LongRunVariance,
};
use crate::error::{Error, Result};
use crate::sim::UnitRoot;
use crate::trend::{ols_fit, OlsFit, TrendSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub k_hat: f64,
    pub k_over_t: f64,
    pub t_times_k: f64,
    #[serde(skip)]
    pub partial_sums: Vec<f64>,
    pub q_t: f64,
    pub len: usize,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Running sums `S_t` and the total energy `Q_T`.
pub fn partial_sums(resid: &[f64]) -> (Vec<f64>, f64) {
    let mut s = CompensatedSum::default();
    let mut q = CompensatedSum::default();
    let sums = resid
        .iter()
        .map(|&e| {
            s.add(e);
            q.add(e * e);
            s.value()
        })
        .collect();
    (sums, q.value())
}

fn sum_of_squares(v: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for &x in v {
        acc.add(x * x);
    }
    acc.value()
}

pub fn k_statistic(resid: &[f64]) -> Result<StatResult> {
    if resid.is_empty() {
        return Err(Error::SeriesTooShort { len: 0, min: 1 });
    }
    let (sums, q_t) = partial_sums(resid);
    if q_t <= 0.0 {
        return Err(Error::ZeroResidualEnergy);
    }
    let n = resid.len() as f64;
    let k_hat = sum_of_squares(&sums) / (n * q_t);
    Ok(StatResult { k_hat, k_over_t: k_hat / n, t_times_k: k_hat * n, partial_sums: sums, q_t, len: resid.len() })
}

/// KPSS-mode statistic: `Σ S_t² / (T² σ̂²_LR)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpssResult {
    pub statistic: f64,
    pub lrv: LongRunVariance,
    pub len: usize,
}

pub fn kpss_statistic(resid: &[f64], bandwidth: usize) -> Result<KpssResult> {
    let lrv = long_run_variance(resid, bandwidth)?;
    let (sums, _) = partial_sums(resid);
    let n = resid.len() as f64;
    Ok(KpssResult { statistic: sum_of_squares(&sums) / (n * n * lrv.value), lrv, len: resid.len() })
}

/// Detrends `y` by OLS (no AR fit) and computes the KPSS-mode statistic.
/// `bandwidth = None` uses [`default_bandwidth`].
pub fn run_kpss_pipeline(y: &[f64], trend: TrendSpec, bandwidth: Option<usize>) -> Result<KpssResult> {
    let fit = ols_fit(y, trend)?;
    kpss_statistic(&fit.residuals, bandwidth.unwrap_or_else(|| default_bandwidth(y.len())))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipelineOptions {
    /// Transformation applied before the ARMA fit. `Plus` differences,
    /// `Minus` sums; the standard construction differences.
    pub transform: Option<UnitRoot>,
    pub css: CssOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `None` when `p = 0`.
    pub arima: Option<ArimaFit>,
    pub filtered: Vec<f64>,
    pub ols: OlsFit,
}

pub fn run_test_pipeline(y: &[f64], p: usize, trend: TrendSpec) -> Result<(StatResult, FitResult)> {
    run_test_pipeline_with(y, p, trend, &PipelineOptions::default())
}

/// ARMA fit on the transformed series, AR filtering of `y`, trend removal
/// by OLS and the statistic on the residuals.
pub fn run_test_pipeline_with(
    y: &[f64],
    p: usize,
    trend: TrendSpec,
    opts: &PipelineOptions,
) -> Result<(StatResult, FitResult)> {
    let (arima, filtered) = if p == 0 {
        (None, y.to_vec())
    } else {
        let root = opts.transform.unwrap_or(UnitRoot::Plus);
        let fit = fit_arima_with(y, p, trend, root, &opts.css)?;
        let filtered = ar_filter(y, &fit.theta_check);
        (Some(fit), filtered)
    };
    let ols = ols_fit(&filtered, trend)?;
    let stat = k_statistic(&ols.residuals)?;
    Ok((stat, FitResult { arima, filtered, ols }))
}

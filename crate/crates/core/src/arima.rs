//! Conditional least squares for the differenced, detrended model
//!
//! ```text
//! A(L)(1 − ρL) Y_t = γ(t/T) + ξ_t + β ξ_{t−1}
//! ```
//!
//! The differenced series is detrended by OLS first; `(θ, β)` then minimise
//! the conditional sum of squares with zero presample values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::NelderMead;
use crate::sim::{is_causal, UnitRoot};
use crate::trend::{ols_fit, TrendSpec};

pub const MIN_EXTRA_OBS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CssOptions {
    pub max_iter: usize,
    pub ftol: f64,
}

impl Default for CssOptions {
    fn default() -> Self {
        Self { max_iter: 500, ftol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaFit {
    pub theta_check: Vec<f64>,
    pub beta_check: f64,
    pub sigma_xi2: f64,
    pub gamma_hat: Vec<f64>,
    pub css: f64,
    pub converged: bool,
    pub iterations: usize,
    /// The optimum was moved back into the causal region.
    pub projected: bool,
    /// Best objective value after each optimizer iteration.
    #[serde(skip)]
    pub css_history: Vec<f64>,
}

/// `z_t = y_t − ρ y_{t−1}` for `t = 2..T`.
pub fn difference(y: &[f64], root: UnitRoot) -> Vec<f64> {
    let rho = root.rho();
    y.windows(2).map(|w| w[1] - rho * w[0]).collect()
}

/// `Y̌_t = Y_t − θ̌₁Y_{t−1} − … − θ̌_pY_{t−p}` with zero presample.
pub fn ar_filter(y: &[f64], theta: &[f64]) -> Vec<f64> {
    (0..y.len())
        .map(|t| theta.iter().enumerate().filter(|(i, _)| t > *i).fold(y[t], |acc, (i, th)| acc - th * y[t - i - 1]))
        .collect()
}

/// Conditional sum of squares of the ARMA(p, 1) recursion on `w`.
pub fn css_objective(w: &[f64], theta: &[f64], beta: f64) -> f64 {
    let mut prev_e = 0.0;
    let mut total = 0.0;
    for t in 0..w.len() {
        let mut e = w[t] - beta * prev_e;
        for (i, th) in theta.iter().enumerate() {
            if t > i {
                e -= th * w[t - i - 1];
            }
        }
        total += e * e;
        prev_e = e;
    }
    total
}

pub fn fit_arima(y: &[f64], p: usize, trend: TrendSpec, root: UnitRoot) -> Result<ArimaFit> {
    fit_arima_with(y, p, trend, root, &CssOptions::default())
}

pub fn fit_arima_with(y: &[f64], p: usize, trend: TrendSpec, root: UnitRoot, opts: &CssOptions) -> Result<ArimaFit> {
    let min = p + trend.n_coef().saturating_sub(1) + MIN_EXTRA_OBS;
    if y.len() < min {
        return Err(Error::SeriesTooShort { len: y.len(), min });
    }
    let z = difference(y, root);
    let detrended = ols_fit(&z, trend)?;
    let w = detrended.residuals;

    let scale = w.iter().map(|v| v * v).sum::<f64>();
    let barrier = 1e6 * (scale + 1.0);
    let objective = |x: &[f64]| {
        let (theta, beta) = x.split_at(p);
        if !is_causal(theta) {
            let excess: f64 = theta.iter().map(|t| t.abs()).sum();
            return barrier * (1.0 + excess);
        }
        css_objective(&w, theta, beta[0])
    };

    let mut lower = vec![f64::NEG_INFINITY; p + 1];
    let mut upper = vec![f64::INFINITY; p + 1];
    lower[p] = -1.0;
    upper[p] = 1.0;
    let mut nm = NelderMead::new(p + 1).bounds(lower, upper);
    nm.max_iter = opts.max_iter;
    nm.ftol = opts.ftol;

    // one start near invertibility, one at the noninvertible boundary region
    let mut best = None;
    let mut iterations = 0;
    for beta0 in [0.0, -0.9] {
        let mut x0 = vec![0.0; p + 1];
        x0[p] = beta0;
        let m = nm.minimize(objective, &x0);
        iterations += m.iterations;
        if best.as_ref().is_none_or(|b: &crate::optim::Minimum| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");

    let (theta, beta) = best.x.split_at(p);
    let mut theta = theta.to_vec();
    let projected = project_causal(&mut theta);
    let beta = beta[0];
    let css = css_objective(&w, &theta, beta);
    Ok(ArimaFit {
        theta_check: theta,
        beta_check: beta,
        sigma_xi2: css / w.len() as f64,
        gamma_hat: detrended.alpha_hat,
        css,
        converged: best.converged,
        iterations,
        projected,
        css_history: best.history,
    })
}

/// Shrinks `theta` until the AR polynomial is causal; returns whether it moved.
fn project_causal(theta: &mut [f64]) -> bool {
    if is_causal(theta) {
        return false;
    }
    let mut factor = 1.0;
    while !is_causal(&theta.iter().map(|t| t * factor).collect::<Vec<_>>()) {
        factor *= 0.999;
    }
    for t in theta.iter_mut() {
        *t *= factor;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kernel {
    Bartlett,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongRunVariance {
    pub value: f64,
    pub bandwidth: usize,
    pub kernel: Kernel,
}

/// `⌊4 (T/100)^{1/4}⌋`, at least 1.
pub fn default_bandwidth(len: usize) -> usize {
    ((4.0 * (len as f64 / 100.0).powf(0.25)).floor() as usize).max(1)
}

/// Bartlett-weighted long-run variance of the demeaned residuals.
pub fn long_run_variance(resid: &[f64], bandwidth: usize) -> Result<LongRunVariance> {
    let n = resid.len();
    if bandwidth == 0 || bandwidth >= n {
        return Err(Error::InvalidArgument(format!("bandwidth {bandwidth} must lie in 1..{n}")));
    }
    let mean = resid.iter().sum::<f64>() / n as f64;
    let e: Vec<f64> = resid.iter().map(|v| v - mean).collect();
    let autocov = |k: usize| e[k..].iter().zip(&e[..n - k]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let gamma0 = autocov(0);
    if gamma0 <= f64::MIN_POSITIVE || e.iter().all(|&v| v.abs() <= 1e-12 * mean.abs().max(1.0)) {
        return Err(Error::DegenerateResiduals);
    }
    let weighted: f64 = (1..=bandwidth).map(|k| (1.0 - k as f64 / (bandwidth as f64 + 1.0)) * autocov(k)).sum();
    let value = gamma0 + 2.0 * weighted;
    if value <= 0.0 {
        return Err(Error::DegenerateResiduals);
    }
    Ok(LongRunVariance { value, bandwidth, kernel: Kernel::Bartlett })
}

//! Polynomial trend least squares on the grid `t/T`, `t = 1..T`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 8;
pub const DEFAULT_MAX_CONDITION: f64 = 1e12;

/// Which deterministic trend is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrendSpec {
    pub kappa_zero: bool,
    pub r: usize,
}

impl TrendSpec {
    /// No trend; the projection is the zero map.
    pub fn none() -> Self {
        Self { kappa_zero: true, r: 0 }
    }

    pub fn poly(r: usize) -> Self {
        Self { kappa_zero: false, r }
    }

    /// Number of fitted coefficients.
    pub fn n_coef(&self) -> usize {
        if self.kappa_zero {
            0
        } else {
            self.r + 1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsOptions {
    pub max_order: usize,
    pub max_condition: f64,
}

impl Default for OlsOptions {
    fn default() -> Self {
        Self { max_order: DEFAULT_MAX_ORDER, max_condition: DEFAULT_MAX_CONDITION }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub alpha_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `X Xᵀ`; empty when no trend is fitted.
    pub gram: DMatrix<f64>,
}

/// `(r+1) × T` matrix with entry `(i, k) = (k/T)^i` (zero-based `i`).
pub fn design_matrix(len: usize, r: usize) -> Result<DMatrix<f64>> {
    if len < r + 1 {
        return Err(Error::UnderdeterminedTrend { len, order: r });
    }
    let big_t = len as f64;
    Ok(DMatrix::from_fn(r + 1, len, |i, k| ((k + 1) as f64 / big_t).powi(i as i32)))
}

/// Limit of `R_T / T`: `M_ij = 1/(i+j−1)` (one-based).
pub fn hilbert_limit(r: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r + 1, r + 1, |i, j| 1.0 / (i + j + 1) as f64)
}

/// Default orthogonality tolerance `1e-8 · ‖y‖₂ · √T`.
pub fn ortho_tolerance(y: &[f64]) -> f64 {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    1e-8 * norm * (y.len() as f64).sqrt()
}

pub fn ols_fit(y: &[f64], trend: TrendSpec) -> Result<OlsFit> {
    ols_fit_with(y, trend, &OlsOptions::default())
}

pub fn ols_fit_with(y: &[f64], trend: TrendSpec, opts: &OlsOptions) -> Result<OlsFit> {
    if trend.kappa_zero {
        return Ok(OlsFit { alpha_hat: Vec::new(), residuals: y.to_vec(), gram: DMatrix::zeros(0, 0) });
    }
    if trend.r > opts.max_order {
        return Err(Error::TrendOrderTooHigh { order: trend.r, max: opts.max_order });
    }
    let x = design_matrix(y.len(), trend.r)?;
    let xt = x.transpose();
    let qr = xt.clone().qr();
    let r_factor = qr.r();
    check_condition(&r_factor, opts.max_condition)?;

    let yv = DVector::from_column_slice(y);
    let qty = qr.q().tr_mul(&yv);
    let alpha = r_factor.solve_upper_triangular(&qty).ok_or(Error::IllConditionedTrend { condition: f64::INFINITY })?;
    let fitted = &xt * &alpha;
    let residuals = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    Ok(OlsFit { alpha_hat: alpha.iter().copied().collect(), residuals, gram: &x * &xt })
}

fn check_condition(r_factor: &DMatrix<f64>, max_condition: f64) -> Result<()> {
    let diag: Vec<f64> = r_factor.diagonal().iter().map(|v| v.abs()).collect();
    let hi = diag.iter().copied().fold(0.0, f64::max);
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if lo == 0.0 { f64::INFINITY } else { hi / lo };
    if condition > max_condition {
        Err(Error::IllConditionedTrend { condition })
    } else {
        Ok(())
    }
}

/// Residual maker for a fixed `(T, trend)`, reused across many series.
///
/// Holds an orthonormal basis of the trend space so that each projection
/// costs `O(T (r+1))`.
#[derive(Debug, Clone)]
pub struct TrendProjector {
    len: usize,
    basis: Option<DMatrix<f64>>,
}

impl TrendProjector {
    pub fn new(len: usize, trend: TrendSpec) -> Result<Self> {
        if trend.kappa_zero {
            return Ok(Self { len, basis: None });
        }
        if trend.r > DEFAULT_MAX_ORDER {
            return Err(Error::TrendOrderTooHigh { order: trend.r, max: DEFAULT_MAX_ORDER });
        }
        let qr = design_matrix(len, trend.r)?.transpose().qr();
        check_condition(&qr.r(), DEFAULT_MAX_CONDITION)?;
        Ok(Self { len, basis: Some(qr.q()) })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Replaces `y` by its least-squares residuals.
    pub fn residualize(&self, y: &mut [f64]) {
        debug_assert_eq!(y.len(), self.len);
        let Some(q) = &self.basis else { return };
        for col in q.column_iter() {
            let c: f64 = col.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
            for (v, qv) in y.iter_mut().zip(col.iter()) {
                *v -= c * qv;
            }
        }
    }
}

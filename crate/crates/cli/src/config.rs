//! `key = value` experiment configuration.
//!
//! ```text
//! # replicate the negative unit root study
//! len = 300
//! n_rep = 2000
//! alpha = 0.05
//! procedures = kpss, lmc, corrected
//! seed = 1
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use trendstat::TrendSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    Kpss,
    Lmc,
    Corrected,
}

impl Procedure {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kpss" => Ok(Procedure::Kpss),
            "lmc" => Ok(Procedure::Lmc),
            "corrected" | "corr" => Ok(Procedure::Corrected),
            other => bail!("unknown procedure {other:?}"),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Procedure::Kpss => "KPSS",
            Procedure::Lmc => "LMC",
            Procedure::Corrected => "CORR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub len: usize,
    pub n_rep: usize,
    pub theta: Vec<f64>,
    pub trend: TrendSpec,
    /// Trend coefficients of the generated paths; zeros by default.
    pub trend_coef: Vec<f64>,
    pub sigma_eps: f64,
    pub sigma_eta: f64,
    pub alpha: f64,
    pub procedures: BTreeSet<Procedure>,
    pub workers: usize,
    pub seed: u64,
    pub table_grid: usize,
    pub table_n_rep: usize,
    pub table_seed: u64,
    /// KPSS bandwidth; `None` uses the default schedule.
    pub bandwidth: Option<usize>,
    pub output_path: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            len: 300,
            n_rep: 2000,
            theta: Vec::new(),
            trend: TrendSpec::none(),
            trend_coef: Vec::new(),
            sigma_eps: 1.0,
            sigma_eta: 1.0,
            alpha: 0.05,
            procedures: [Procedure::Kpss, Procedure::Lmc, Procedure::Corrected].into_iter().collect(),
            workers: 1,
            seed: 1,
            table_grid: trendstat::limit::DEFAULT_GRID,
            table_n_rep: trendstat::limit::DEFAULT_REPLICATIONS,
            table_seed: 1,
            bandwidth: None,
            output_path: None,
        }
    }
}

fn list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("bad number {s:?}")))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut kappa_zero = true;
        let mut r = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').with_context(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: bad value for {key}", i + 1);
            match key {
                "len" | "T" => cfg.len = value.parse().with_context(ctx)?,
                "n_rep" => cfg.n_rep = value.parse().with_context(ctx)?,
                "p" => cfg.theta.resize(value.parse().with_context(ctx)?, 0.0),
                "theta" => cfg.theta = list(value).with_context(ctx)?,
                "trend" => match value {
                    "none" => kappa_zero = true,
                    "poly" => kappa_zero = false,
                    _ => bail!("line {}: trend must be none or poly", i + 1),
                },
                "r" => r = value.parse().with_context(ctx)?,
                "trend_coef" => cfg.trend_coef = list(value).with_context(ctx)?,
                "sigma_eps" => cfg.sigma_eps = value.parse().with_context(ctx)?,
                "sigma_eta" => cfg.sigma_eta = value.parse().with_context(ctx)?,
                "alpha" => cfg.alpha = value.parse().with_context(ctx)?,
                "procedures" => {
                    cfg.procedures = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(Procedure::parse)
                        .collect::<Result<_>>()?
                }
                "workers" => cfg.workers = value.parse().with_context(ctx)?,
                "seed" => cfg.seed = value.parse().with_context(ctx)?,
                "table_grid" => cfg.table_grid = value.parse().with_context(ctx)?,
                "table_n_rep" => cfg.table_n_rep = value.parse().with_context(ctx)?,
                "table_seed" => cfg.table_seed = value.parse().with_context(ctx)?,
                "bandwidth" => cfg.bandwidth = Some(value.parse().with_context(ctx)?),
                "output" | "output_path" => cfg.output_path = Some(value.to_string()),
                other => bail!("line {}: unknown key {other:?}", i + 1),
            }
        }
        cfg.trend = if kappa_zero { TrendSpec::none() } else { TrendSpec::poly(r) };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rep == 0 {
            bail!("n_rep must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            bail!("alpha must lie in (0, 0.5)");
        }
        if self.procedures.is_empty() {
            bail!("no procedures selected");
        }
        if self.sigma_eps <= 0.0 || self.sigma_eta < 0.0 {
            bail!("need sigma_eps > 0 and sigma_eta >= 0");
        }
        if !self.trend.kappa_zero && self.trend_coef.len() > self.trend.r + 1 {
            bail!("more trend coefficients than the trend order allows");
        }
        trendstat::sim::check_causal(&self.theta)?;
        Ok(())
    }
}

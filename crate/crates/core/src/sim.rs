//! Noise, random walks and complete paths of the generating process
//!
//! ```text
//! A(L) Y_t = trend(t/T) 1{κ≠0} + S_t + ε_t,   S_t = ρ S_{t-1} + η_t
//! ```
//!
//! with zero initial conditions. For `d ≥ 2` the walk is the d-fold
//! cumulative sum of `η`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::series::TimeSeries;

/// Roots of the AR polynomial must have modulus above `1 + CAUSAL_MARGIN`.
pub const CAUSAL_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NoiseDistribution {
    #[default]
    Gaussian,
}

/// A white noise source bound to one random substream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub distribution: NoiseDistribution,
    pub seed: u64,
    pub stream_id: u64,
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64, seed: u64, stream_id: u64) -> Self {
        Self { sigma, distribution: NoiseDistribution::Gaussian, seed, stream_id }
    }
}

/// Location of the unit root of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitRoot {
    /// ρ = +1, ordinary random walk.
    Plus,
    /// ρ = −1, alternating walk.
    Minus,
}

impl UnitRoot {
    pub fn rho(self) -> f64 {
        match self {
            UnitRoot::Plus => 1.0,
            UnitRoot::Minus => -1.0,
        }
    }
}

/// Draws `n` values of the noise. `sigma = 0` gives exact zeros.
pub fn draw_noise(spec: &NoiseSpec, n: usize) -> Vec<f64> {
    if spec.sigma == 0.0 {
        return vec![0.0; n];
    }
    let mut rng = substream(spec.seed, spec.stream_id);
    match spec.distribution {
        NoiseDistribution::Gaussian => (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                spec.sigma * z
            })
            .collect(),
    }
}

/// `S_t = ρ S_{t-1} + η_t` with `S_0 = 0`.
pub fn random_walk(eta: &[f64], root: UnitRoot) -> Vec<f64> {
    let rho = root.rho();
    let mut s = 0.0;
    eta.iter()
        .map(|&e| {
            s = rho * s + e;
            s
        })
        .collect()
}

/// d-fold iterated cumulative sum of `eta`.
pub fn integrated_walk(eta: &[f64], d: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::ZeroIntegrationOrder);
    }
    let mut out = eta.to_vec();
    for _ in 0..d {
        cumsum_in_place(&mut out);
    }
    Ok(out)
}

pub(crate) fn cumsum_in_place(v: &mut [f64]) {
    let mut acc = 0.0;
    for x in v.iter_mut() {
        acc += *x;
        *x = acc;
    }
}

/// Smallest modulus among the zeroes of `A(z) = 1 − θ₁z − … − θ_p z^p`.
///
/// The zeroes are the reciprocals of the companion-matrix eigenvalues.
/// Returns `f64::INFINITY` when `A` has no zeroes (p = 0 or all θ zero).
pub fn min_root_modulus(theta: &[f64]) -> f64 {
    let p = theta.len();
    if p == 0 || theta.iter().all(|&t| t == 0.0) {
        return f64::INFINITY;
    }
    if p == 1 {
        return 1.0 / theta[0].abs();
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for (j, &t) in theta.iter().enumerate() {
        companion[(0, j)] = t;
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    let largest = companion.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if largest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / largest
    }
}

pub fn is_causal(theta: &[f64]) -> bool {
    min_root_modulus(theta) > 1.0 + CAUSAL_MARGIN
}

pub fn check_causal(theta: &[f64]) -> Result<()> {
    let modulus = min_root_modulus(theta);
    if modulus > 1.0 + CAUSAL_MARGIN {
        Ok(())
    } else {
        Err(Error::NoncausalAr { modulus })
    }
}

/// Full parameter set of the generating process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub theta: Vec<f64>,
    pub kappa_zero: bool,
    /// Trend coefficients `α₀, …, α_r`; the trend order is `alpha.len() − 1`.
    pub alpha: Vec<f64>,
    pub rho: UnitRoot,
    /// Integration order of the walk; 0 means no walk (null hypothesis).
    pub d: usize,
    pub eps_noise: NoiseSpec,
    pub eta_noise: NoiseSpec,
    pub len: usize,
    /// Leading observations simulated and then dropped.
    pub burn_in: usize,
}

impl DgpConfig {
    /// The simplest setting: no AR part, no trend, standard noises.
    pub fn simple(len: usize, rho: UnitRoot, d: usize, sigma_eta: f64, seed: u64, stream: u64) -> Self {
        Self {
            theta: Vec::new(),
            kappa_zero: true,
            alpha: Vec::new(),
            rho,
            d,
            eps_noise: NoiseSpec::gaussian(1.0, seed, 2 * stream),
            eta_noise: NoiseSpec::gaussian(sigma_eta, seed, 2 * stream + 1),
            len,
            burn_in: 0,
        }
    }

    pub fn p(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.len == 0 {
            return Err(Error::InvalidArgument("sample size must be positive".into()));
        }
        if self.eps_noise.sigma < 0.0 || self.eta_noise.sigma < 0.0 {
            return Err(Error::InvalidArgument("noise standard deviations must be nonnegative".into()));
        }
        if !self.kappa_zero && self.alpha.is_empty() {
            return Err(Error::InvalidArgument("a trend needs at least one coefficient".into()));
        }
        if self.d >= 2 && self.rho == UnitRoot::Minus {
            return Err(Error::UnsupportedNegativeMultiIntegration { d: self.d });
        }
        check_causal(&self.theta)
    }
}

/// Simulates one path of length `cfg.len`.
pub fn simulate_dgp(cfg: &DgpConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let total = cfg.len + cfg.burn_in;
    let eps = draw_noise(&cfg.eps_noise, total);
    let walk = match cfg.d {
        0 => vec![0.0; total],
        1 => random_walk(&draw_noise(&cfg.eta_noise, total), cfg.rho),
        d => integrated_walk(&draw_noise(&cfg.eta_noise, total), d)?,
    };

    let big_t = cfg.len as f64;
    let p = cfg.p();
    let mut y = vec![0.0; total];
    for t in 0..total {
        let mut v = walk[t] + eps[t];
        if !cfg.kappa_zero {
            // grid position of observation t+1 after the burn-in
            let x = (t as f64 + 1.0 - cfg.burn_in as f64) / big_t;
            v += horner(&cfg.alpha, x);
        }
        for (i, &th) in cfg.theta.iter().enumerate().take(p) {
            if t > i {
                v += th * y[t - i - 1];
            }
        }
        y[t] = v;
    }
    y.drain(..cfg.burn_in);
    Ok(TimeSeries::new(y))
}

/// Evaluates `c₀ + c₁x + … + c_r x^r`.
pub(crate) fn horner(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

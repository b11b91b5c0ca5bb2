//! Monte Carlo sampling of the limiting functionals of `K̂_T`.
//!
//! Each functional is sampled through its finite-grid analogue: standard
//! normal innovations are partially summed (Donsker), detrended with the
//! same least-squares projection used by the test, and the integrals are
//! replaced by Riemann sums on the grid `t/T`.
//!
//! | hypothesis | trend | functional |
//! |---|---|---|
//! | H0 | none | `∫W²` |
//! | H0 | order r | `∫B_r²` |
//! | H1⁺ | none | `∫W^(d)² / ∫W^(d−1)²` |
//! | H1⁺ | order r | `∫C_{r,d}² / ∫W_{r,d−1}²` |
//! | H1⁻ | none | `(2σ_ε²∫W_ε² + σ_η²∫W_η²) / (2σ_η²∫W_η²)` |

mod cache;
mod table;

pub use cache::{TableCache, TableKey, CACHE_DIR_ENV};
pub use table::{build_table, build_table_with, empirical_quantile, lookup, Lookup, QuantileTable};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::sim::cumsum_in_place;
use crate::trend::{TrendProjector, TrendSpec};

pub const MIN_GRID: usize = 200;
pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_REPLICATIONS: usize = 50_000;
pub const PROBABILITY_GRID: [f64; 9] = [0.01, 0.025, 0.05, 0.10, 0.50, 0.90, 0.95, 0.975, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1Plus,
    H1MinusNoTrend,
}

impl Hypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1Plus => "H1_plus",
            Hypothesis::H1MinusNoTrend => "H1_minus_notrend",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H0" => Ok(Hypothesis::H0),
            "H1_plus" => Ok(Hypothesis::H1Plus),
            "H1_minus_notrend" => Ok(Hypothesis::H1MinusNoTrend),
            other => Err(Error::InvalidArgument(format!("unknown functional {other:?}"))),
        }
    }
}

/// Identifies one limiting law. Constructors normalise the fields that do
/// not apply (`r = 0` without trend, `d = 0` outside H1⁺).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionalId {
    pub hypothesis: Hypothesis,
    pub kappa_zero: bool,
    pub r: usize,
    pub d: usize,
}

impl FunctionalId {
    pub fn h0(trend: TrendSpec) -> Self {
        Self { hypothesis: Hypothesis::H0, kappa_zero: trend.kappa_zero, r: trend.n_coef().saturating_sub(1), d: 0 }
    }

    pub fn h1_plus(trend: TrendSpec, d: usize) -> Self {
        Self {
            hypothesis: Hypothesis::H1Plus,
            kappa_zero: trend.kappa_zero,
            r: trend.n_coef().saturating_sub(1),
            d: d.max(1),
        }
    }

    pub fn h1_minus() -> Self {
        Self { hypothesis: Hypothesis::H1MinusNoTrend, kappa_zero: true, r: 0, d: 0 }
    }

    pub fn trend(&self) -> TrendSpec {
        if self.kappa_zero {
            TrendSpec::none()
        } else {
            TrendSpec::poly(self.r)
        }
    }

    /// True if this is the null law for statistics computed with `trend`.
    pub fn is_null_for(&self, trend: TrendSpec) -> bool {
        *self == FunctionalId::h0(trend)
    }
}

impl fmt::Display for FunctionalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kappa_zero {
            write!(f, "{}(no trend", self.hypothesis)?;
        } else {
            write!(f, "{}(r={}", self.hypothesis, self.r)?;
        }
        if self.hypothesis == Hypothesis::H1Plus {
            write!(f, ", d={}", self.d)?;
        }
        f.write_str(")")
    }
}

fn standard_normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `(1/T) Σ_t x_t²` with each `x_t` first divided by `scale`.
fn riemann_energy(x: &[f64], scale: f64) -> f64 {
    x.iter().map(|v| (v / scale).powi(2)).sum::<f64>() / x.len() as f64
}

/// Reusable sampler for one functional on one grid.
#[derive(Debug, Clone)]
pub struct FunctionalSampler {
    id: FunctionalId,
    grid: usize,
    projector: TrendProjector,
    sigma_eps: f64,
    sigma_eta: f64,
}

impl FunctionalSampler {
    pub fn new(id: FunctionalId, grid: usize) -> Result<Self> {
        if grid < MIN_GRID {
            return Err(Error::InvalidArgument(format!("grid size {grid} below {MIN_GRID}")));
        }
        if id.hypothesis == Hypothesis::H1MinusNoTrend && !id.kappa_zero {
            return Err(Error::InvalidArgument("the negative unit root law is only available without trend".into()));
        }
        Ok(Self { id, grid, projector: TrendProjector::new(grid, id.trend())?, sigma_eps: 1.0, sigma_eta: 1.0 })
    }

    /// Sampler for the negative unit root ratio with the given noise scales.
    pub fn negative_root(sigma_eps: f64, sigma_eta: f64, grid: usize) -> Result<Self> {
        if sigma_eta <= 0.0 {
            return Err(Error::InvalidArgument("sigma_eta must be positive".into()));
        }
        if sigma_eps < 0.0 {
            return Err(Error::InvalidArgument("sigma_eps must be nonnegative".into()));
        }
        let mut s = Self::new(FunctionalId::h1_minus(), grid)?;
        s.sigma_eps = sigma_eps;
        s.sigma_eta = sigma_eta;
        Ok(s)
    }

    pub fn id(&self) -> FunctionalId {
        self.id
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// One draw from substream `stream` of `seed`.
    pub fn draw(&self, seed: u64, stream: u64) -> f64 {
        let mut rng = substream(seed, stream);
        let k = if self.id.hypothesis == Hypothesis::H1MinusNoTrend { 2 } else { 1 };
        let mut z = standard_normals(&mut rng, k * self.grid);
        self.evaluate(&mut z)
    }

    /// The functional of the given standard normal innovations, consumed as
    /// scratch space. Two blocks of `grid` values are needed for the negative
    /// unit root law, one otherwise.
    pub fn evaluate(&self, innovations: &mut [f64]) -> f64 {
        match self.id.hypothesis {
            Hypothesis::H0 => self.eval_h0(&mut innovations[..self.grid]),
            Hypothesis::H1Plus => self.eval_h1_plus(&mut innovations[..self.grid]),
            Hypothesis::H1MinusNoTrend => {
                let (a, b) = innovations.split_at_mut(self.grid);
                self.eval_negative_root(a, &mut b[..self.grid])
            }
        }
    }

    fn eval_h0(&self, e: &mut [f64]) -> f64 {
        self.projector.residualize(e);
        cumsum_in_place(e);
        riemann_energy(e, (self.grid as f64).sqrt())
    }

    fn eval_h1_plus(&self, e: &mut [f64]) -> f64 {
        let n = self.grid as f64;
        let d = self.id.d as i32;
        for _ in 0..d {
            cumsum_in_place(e);
        }
        self.projector.residualize(e);
        let denominator = riemann_energy(e, n.powf(d as f64 - 0.5));
        cumsum_in_place(e);
        let numerator = riemann_energy(e, n.powf(d as f64 + 0.5));
        numerator / denominator
    }

    fn eval_negative_root(&self, w_eps: &mut [f64], w_eta: &mut [f64]) -> f64 {
        let scale = (self.grid as f64).sqrt();
        cumsum_in_place(w_eps);
        cumsum_in_place(w_eta);
        let a = riemann_energy(w_eps, scale);
        let b = riemann_energy(w_eta, scale);
        // (2σ_ε²A + σ_η²B) / (2σ_η²B), written so the 1/2 floor is exact
        0.5 + (self.sigma_eps * self.sigma_eps * a) / (self.sigma_eta * self.sigma_eta * b)
    }
}

pub fn sample_h0_functional(id: FunctionalId, grid: usize, seed: u64, stream: u64) -> Result<f64> {
    if id.hypothesis != Hypothesis::H0 {
        return Err(Error::InvalidArgument(format!("{id} is not a null functional")));
    }
    Ok(FunctionalSampler::new(id, grid)?.draw(seed, stream))
}

pub fn sample_h1_plus_functional(id: FunctionalId, grid: usize, seed: u64, stream: u64) -> Result<f64> {
    if id.hypothesis != Hypothesis::H1Plus {
        return Err(Error::InvalidArgument(format!("{id} is not a positive unit root functional")));
    }
    Ok(FunctionalSampler::new(id, grid)?.draw(seed, stream))
}

/// Limit of `T·K̂_T` for the negative unit root without trend, with the
/// cross term and the parity of the partial sums kept:
/// `∫(σ_ε W_ε + σ_η W_Z/2)² / (σ_η² ∫W_U²) + 1/4`, where `W_U` and `W_Z` are
/// the alternating and plain sums of the η innovations. Unlike the two-term
/// ratio this law can fall below 1/2, and matches simulated paths.
pub fn sample_negative_root_law(sigma_eps: f64, sigma_eta: f64, grid: usize, seed: u64, stream: u64) -> Result<f64> {
    if sigma_eta <= 0.0 || sigma_eps < 0.0 {
        return Err(Error::InvalidArgument("need sigma_eta > 0 and sigma_eps >= 0".into()));
    }
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid size {grid} below {MIN_GRID}")));
    }
    let mut rng = substream(seed, stream);
    let mut w_eps = standard_normals(&mut rng, grid);
    let mut w_z = standard_normals(&mut rng, grid);
    let mut w_u = standard_normals(&mut rng, grid);
    for w in [&mut w_eps, &mut w_z, &mut w_u] {
        cumsum_in_place(w);
    }
    let mix: Vec<f64> = w_eps.iter().zip(&w_z).map(|(e, z)| sigma_eps * e + 0.5 * sigma_eta * z).collect();
    let scale = (grid as f64).sqrt();
    Ok(riemann_energy(&mix, scale) / (sigma_eta * sigma_eta * riemann_energy(&w_u, scale)) + 0.25)
}

pub fn sample_prop1_functional(sigma_eps: f64, sigma_eta: f64, grid: usize, seed: u64, stream: u64) -> Result<f64> {
    Ok(FunctionalSampler::negative_root(sigma_eps, sigma_eta, grid)?.draw(seed, stream))
}

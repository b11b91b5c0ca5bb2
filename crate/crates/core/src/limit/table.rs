use std::time::{SystemTime, UNIX_EPOCH};

use super::{FunctionalId, FunctionalSampler};
use crate::error::{Error, Result};
use crate::parallel::{map_indexed, Execution};

pub const MIN_REPLICATIONS: usize = 1000;

/// Empirical quantiles of one limiting functional.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    pub id: FunctionalId,
    pub grid: usize,
    pub n_rep: usize,
    pub seed: u64,
    /// `(probability, value)` sorted by probability.
    pub quantiles: Vec<(f64, f64)>,
    pub mean: f64,
    /// Seconds since the Unix epoch; not part of the table identity.
    pub created_at: Option<u64>,
}

impl QuantileTable {
    /// Same key and same numbers, ignoring the creation time.
    pub fn same_contents(&self, other: &Self) -> bool {
        self.id == other.id
            && self.grid == other.grid
            && self.n_rep == other.n_rep
            && self.seed == other.seed
            && self.mean.to_bits() == other.mean.to_bits()
            && self.quantiles.len() == other.quantiles.len()
            && self
                .quantiles
                .iter()
                .zip(&other.quantiles)
                .all(|(a, b)| a.0.to_bits() == b.0.to_bits() && a.1.to_bits() == b.1.to_bits())
    }

    pub fn min_prob(&self) -> f64 {
        self.quantiles.first().map_or(0.0, |q| q.0)
    }

    pub fn max_prob(&self) -> f64 {
        self.quantiles.last().map_or(1.0, |q| q.0)
    }

    /// Interpolated distribution function at `x`, clamped to the stored
    /// probability range. The flag is set when `x` lies outside the stored
    /// values.
    pub fn cdf(&self, x: f64) -> (f64, bool) {
        let q = &self.quantiles;
        let (first, last) = (q[0], q[q.len() - 1]);
        if x < first.1 {
            return (first.0, true);
        }
        if x > last.1 {
            return (last.0, true);
        }
        for w in q.windows(2) {
            let ((p0, v0), (p1, v1)) = (w[0], w[1]);
            if x <= v1 {
                if v1 == v0 {
                    return (p0, false);
                }
                return (p0 + (p1 - p0) * (x - v0) / (v1 - v0), false);
            }
        }
        (last.0, false)
    }
}

/// Linear interpolation of order statistics at position `(n−1)p`.
pub fn empirical_quantile(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::InvalidArgument("probabilities must lie in (0, 1)".into()));
    }
    if probs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("probabilities must be strictly increasing".into()));
    }
    Ok(())
}

/// Builds a table from `n_rep` draws of `sampler(replication)`.
pub fn build_table_with<F>(
    id: FunctionalId,
    grid: usize,
    n_rep: usize,
    seed: u64,
    probs: &[f64],
    exec: Execution,
    sampler: F,
) -> Result<QuantileTable>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    if n_rep < MIN_REPLICATIONS {
        return Err(Error::InvalidArgument(format!("n_rep {n_rep} below {MIN_REPLICATIONS}")));
    }
    check_probs(probs)?;
    let mut draws = map_indexed(n_rep, exec, |i| sampler(i as u64));
    let mean = draws.iter().sum::<f64>() / n_rep as f64;
    draws.sort_by(f64::total_cmp);
    let quantiles = probs.iter().map(|&p| (p, empirical_quantile(&draws, p))).collect();
    let created_at = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    Ok(QuantileTable { id, grid, n_rep, seed, quantiles, mean, created_at })
}

pub fn build_table(
    id: FunctionalId,
    grid: usize,
    n_rep: usize,
    seed: u64,
    probs: &[f64],
    exec: Execution,
) -> Result<QuantileTable> {
    let sampler = FunctionalSampler::new(id, grid)?;
    build_table_with(id, grid, n_rep, seed, probs, exec, |i| sampler.draw(seed, i))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup {
    pub value: f64,
    /// `prob` lay outside the stored range and was clamped.
    pub extrapolated: bool,
}

/// Quantile at `prob` by linear interpolation between stored levels.
pub fn lookup(table: &QuantileTable, prob: f64) -> Result<Lookup> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidArgument(format!("probability {prob} outside (0, 1)")));
    }
    let q = &table.quantiles;
    if q.is_empty() {
        return Err(Error::InvalidArgument("empty quantile table".into()));
    }
    if prob <= q[0].0 {
        return Ok(Lookup { value: q[0].1, extrapolated: prob < q[0].0 });
    }
    let last = q[q.len() - 1];
    if prob >= last.0 {
        return Ok(Lookup { value: last.1, extrapolated: prob > last.0 });
    }
    let value = q
        .windows(2)
        .find(|w| prob <= w[1].0)
        .map(|w| {
            let ((p0, v0), (p1, v1)) = (w[0], w[1]);
            v0 + (v1 - v0) * (prob - p0) / (p1 - p0)
        })
        .expect("prob lies inside the stored range");
    Ok(Lookup { value, extrapolated: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::PROBABILITY_GRID;
    use crate::trend::TrendSpec;

    fn toy() -> QuantileTable {
        QuantileTable {
            id: FunctionalId::h0(TrendSpec::none()),
            grid: 200,
            n_rep: 1000,
            seed: 0,
            quantiles: vec![(0.5, 1.0), (0.9, 2.0), (0.95, 4.0), (0.99, 8.0)],
            mean: 1.5,
            created_at: None,
        }
    }

    #[test]
    fn constant_sampler() {
        let t = build_table_with(toy().id, 200, 1000, 1, &[0.5], Execution::Parallel, |_| 3.25).unwrap();
        assert_eq!(t.quantiles, vec![(0.5, 3.25)]);
        assert_eq!(t.mean, 3.25);
    }

    #[test]
    fn preconditions() {
        assert!(build_table_with(toy().id, 200, 999, 1, &[0.5], Execution::Sequential, |_| 1.0).is_err());
        assert!(build_table_with(toy().id, 200, 1000, 1, &[0.5, 0.5], Execution::Sequential, |_| 1.0).is_err());
        assert!(build_table_with(toy().id, 200, 1000, 1, &[1.0], Execution::Sequential, |_| 1.0).is_err());
    }

    #[test]
    fn order_statistic_interpolation() {
        let sorted = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(empirical_quantile(&sorted, 0.5), 3.0);
        assert_eq!(empirical_quantile(&sorted, 0.125), 1.5);
        assert_eq!(empirical_quantile(&sorted, 0.99), 4.96);
    }

    #[test]
    fn lookup_cases() {
        let t = toy();
        assert_eq!(lookup(&t, 0.9).unwrap(), Lookup { value: 2.0, extrapolated: false });
        let mid = lookup(&t, 0.925).unwrap();
        assert!((mid.value - 3.0).abs() < 1e-12 && !mid.extrapolated);
        assert_eq!(lookup(&t, 0.999).unwrap(), Lookup { value: 8.0, extrapolated: true });
        assert_eq!(lookup(&t, 0.1).unwrap(), Lookup { value: 1.0, extrapolated: true });
        assert!(lookup(&t, 0.0).is_err() && lookup(&t, 1.0).is_err());
    }

    #[test]
    fn cdf_inverts_lookup() {
        let t = toy();
        let (f, beyond) = t.cdf(3.0);
        assert!((f - 0.925).abs() < 1e-12 && !beyond);
        assert_eq!(t.cdf(9.0), (0.99, true));
        assert_eq!(t.cdf(0.5), (0.5, true));
    }

    #[test]
    fn quantiles_are_monotone_and_reproducible() {
        let id = FunctionalId::h0(TrendSpec::none());
        let a = build_table(id, 200, 1000, 3, &PROBABILITY_GRID, Execution::Parallel).unwrap();
        let b = build_table(id, 200, 1000, 3, &PROBABILITY_GRID, Execution::Sequential).unwrap();
        assert!(a.same_contents(&b));
        assert!(a.quantiles.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(a.quantiles.iter().all(|q| q.1 > 0.0));
    }
}

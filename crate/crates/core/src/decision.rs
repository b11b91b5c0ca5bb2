//! Rejection rules for the null of trend-stationarity.
//!
//! The classic rule rejects for large statistics only. Under a walk with a
//! negative unit root the statistic collapses to zero instead, so the
//! corrected rule moves half of the level to the lower tail:
//! reject when `K̂ < k_{α/2}` or `K̂ > k_{1−α/2}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{lookup, QuantileTable, TableKey};
use crate::trend::TrendSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Classic,
    Corrected,
    UpperOnly,
    LowerOnly,
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(Rule::Classic),
            "corrected" => Ok(Rule::Corrected),
            "upper" | "upper_only" => Ok(Rule::UpperOnly),
            "lower" | "lower_only" => Ok(Rule::LowerOnly),
            other => Err(Error::InvalidArgument(format!("unknown rule {other:?}"))),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Classic => "classic",
            Rule::Corrected => "corrected",
            Rule::UpperOnly => "upper_only",
            Rule::LowerOnly => "lower_only",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    None,
    H1PlusSide,
    H1MinusSide,
}

/// Which null table a report relied on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableProvenance {
    pub functional: String,
    pub kappa_zero: bool,
    pub r: usize,
    pub grid_t: usize,
    pub n_rep: usize,
    pub seed: u64,
}

impl From<&QuantileTable> for TableProvenance {
    fn from(t: &QuantileTable) -> Self {
        let key = TableKey::of(t);
        Self {
            functional: key.id.hypothesis.to_string(),
            kappa_zero: key.id.kappa_zero,
            r: key.id.r,
            grid_t: key.grid,
            n_rep: key.n_rep,
            seed: key.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub rule: Rule,
    pub alpha: f64,
    pub lower_cut: Option<f64>,
    pub upper_cut: Option<f64>,
    pub reject: bool,
    pub direction: Direction,
    /// `(probability, quantile)` pairs used for the cuts.
    pub quantiles_consulted: Vec<(f64, f64)>,
    /// A cut probability lay outside the stored grid and was clamped.
    pub cut_extrapolated: bool,
    pub table: TableProvenance,
}

fn check_inputs(trend: TrendSpec, table: &QuantileTable, alpha: Option<f64>) -> Result<()> {
    if !table.id.is_null_for(trend) {
        return Err(Error::WrongNullTable(format!("table {} does not match the fitted trend {:?}", table.id, trend)));
    }
    if let Some(a) = alpha {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::InvalidArgument(format!("alpha {a} outside (0, 0.5)")));
        }
    }
    Ok(())
}

pub fn decide(statistic: f64, trend: TrendSpec, table: &QuantileTable, rule: Rule, alpha: f64) -> Result<TestReport> {
    check_inputs(trend, table, Some(alpha))?;
    let (lower_p, upper_p) = match rule {
        Rule::Classic | Rule::UpperOnly => (None, Some(1.0 - alpha)),
        Rule::Corrected => (Some(alpha / 2.0), Some(1.0 - alpha / 2.0)),
        Rule::LowerOnly => (Some(alpha), None),
    };
    let mut consulted = Vec::new();
    let mut extrapolated = false;
    let mut cut = |p: Option<f64>| -> Result<Option<f64>> {
        p.map(|p| {
            let l = lookup(table, p)?;
            extrapolated |= l.extrapolated;
            consulted.push((p, l.value));
            Ok(l.value)
        })
        .transpose()
    };
    let lower_cut = cut(lower_p)?;
    let upper_cut = cut(upper_p)?;

    let direction = if lower_cut.is_some_and(|c| statistic < c) {
        Direction::H1MinusSide
    } else if upper_cut.is_some_and(|c| statistic > c) {
        Direction::H1PlusSide
    } else {
        Direction::None
    };
    Ok(TestReport {
        statistic,
        rule,
        alpha,
        lower_cut,
        upper_cut,
        reject: direction != Direction::None,
        direction,
        quantiles_consulted: consulted,
        cut_extrapolated: extrapolated,
        table: TableProvenance::from(table),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PBound {
    Approximate,
    /// The statistic lies beyond the stored grid; the p-value is below `value`.
    LessThan,
    /// The p-value is above `value`.
    GreaterThan,
}

/// A p-value interpolated from a quantile table; never exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub bound: PBound,
    pub interpolated: bool,
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            PBound::Approximate => write!(f, "~{:.4}", self.value),
            PBound::LessThan => write!(f, "< {}", self.value),
            PBound::GreaterThan => write!(f, "> {}", self.value),
        }
    }
}

pub fn approximate_p_value(statistic: f64, trend: TrendSpec, table: &QuantileTable, rule: Rule) -> Result<PValue> {
    check_inputs(trend, table, None)?;
    let (cdf, beyond) = table.cdf(statistic);
    let above = beyond && cdf >= table.max_prob() && statistic > table.quantiles[0].1;
    let below = beyond && !above;
    let (value, bound) = match rule {
        Rule::Classic | Rule::UpperOnly => {
            let p = 1.0 - cdf;
            (
                p,
                if above {
                    PBound::LessThan
                } else if below {
                    PBound::GreaterThan
                } else {
                    PBound::Approximate
                },
            )
        }
        Rule::LowerOnly => (
            cdf,
            if below {
                PBound::LessThan
            } else if above {
                PBound::GreaterThan
            } else {
                PBound::Approximate
            },
        ),
        Rule::Corrected => {
            let p = (2.0 * cdf.min(1.0 - cdf)).min(1.0);
            (p, if beyond { PBound::LessThan } else { PBound::Approximate })
        }
    };
    Ok(PValue { value, bound, interpolated: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::FunctionalId;

    fn table() -> QuantileTable {
        let q = [
            (0.01, 0.03),
            (0.025, 0.04),
            (0.05, 0.05),
            (0.10, 0.07),
            (0.50, 0.29),
            (0.90, 1.19),
            (0.95, 1.65),
            (0.975, 2.14),
            (0.99, 2.78),
        ];
        QuantileTable {
            id: FunctionalId::h0(TrendSpec::none()),
            grid: 2000,
            n_rep: 1000,
            seed: 1,
            quantiles: q.to_vec(),
            mean: 0.5,
            created_at: None,
        }
    }

    #[test]
    fn classic_rejects_upper_tail() {
        let r = decide(2.0, TrendSpec::none(), &table(), Rule::Classic, 0.05).unwrap();
        assert!(r.reject);
        assert_eq!(r.direction, Direction::H1PlusSide);
        assert_eq!(r.upper_cut, Some(1.65));
        assert_eq!(r.lower_cut, None);
    }

    #[test]
    fn corrected_rejects_lower_tail() {
        let r = decide(0.035, TrendSpec::none(), &table(), Rule::Corrected, 0.05).unwrap();
        assert!(r.reject);
        assert_eq!(r.direction, Direction::H1MinusSide);
        assert_eq!(r.quantiles_consulted, vec![(0.025, 0.04), (0.975, 2.14)]);
        let classic = decide(0.035, TrendSpec::none(), &table(), Rule::Classic, 0.05).unwrap();
        assert!(!classic.reject);
    }

    #[test]
    fn median_is_accepted_by_every_rule() {
        for rule in [Rule::Classic, Rule::Corrected, Rule::UpperOnly, Rule::LowerOnly] {
            let r = decide(0.29, TrendSpec::none(), &table(), rule, 0.05).unwrap();
            assert!(!r.reject, "{rule}");
            assert_eq!(r.direction, Direction::None);
        }
    }

    #[test]
    fn directional_rules() {
        let lower = decide(0.045, TrendSpec::none(), &table(), Rule::LowerOnly, 0.05).unwrap();
        assert!(lower.reject && lower.upper_cut.is_none() && lower.lower_cut == Some(0.05));
        let upper = decide(1.7, TrendSpec::none(), &table(), Rule::UpperOnly, 0.05).unwrap();
        assert!(upper.reject);
    }

    #[test]
    fn mismatched_table_and_bad_alpha() {
        assert!(matches!(
            decide(1.0, TrendSpec::poly(1), &table(), Rule::Classic, 0.05),
            Err(Error::WrongNullTable(_))
        ));
        assert!(decide(1.0, TrendSpec::none(), &table(), Rule::Classic, 0.5).is_err());
    }

    #[test]
    fn p_values() {
        let t = table();
        let p = approximate_p_value(0.29, TrendSpec::none(), &t, Rule::Classic).unwrap();
        assert!((p.value - 0.5).abs() < 1e-12 && p.interpolated);
        let p = approximate_p_value(5.0, TrendSpec::none(), &t, Rule::Classic).unwrap();
        assert_eq!(p.bound, PBound::LessThan);
        assert!((p.value - 0.01).abs() < 1e-12);
        assert_eq!(p.to_string(), format!("< {}", p.value));
        let p = approximate_p_value(0.05, TrendSpec::none(), &t, Rule::Corrected).unwrap();
        assert!((p.value - 0.10).abs() < 1e-12);
        let p = approximate_p_value(0.01, TrendSpec::none(), &t, Rule::Corrected).unwrap();
        assert_eq!(p.bound, PBound::LessThan);
    }
}

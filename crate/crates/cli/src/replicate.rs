//! Rejection rates of the stationarity tests on simulated paths.

use anyhow::Result;
use serde::Serialize;
use trendstat::decision::TableProvenance;
use trendstat::kstat::run_kpss_pipeline;
use trendstat::parallel::{map_indexed, Execution};
use trendstat::rng::derive_seed;
use trendstat::sim::NoiseSpec;
use trendstat::{
    decide, run_test_pipeline, simulate_dgp, DgpConfig, FunctionalId, QuantileTable, Rule, TableCache, TableKey,
    UnitRoot,
};

use crate::config::{ExperimentConfig, Procedure};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scenario {
    #[serde(rename = "H0")]
    Null,
    #[serde(rename = "H1_plus")]
    PositiveRoot,
    #[serde(rename = "H1_minus")]
    NegativeRoot,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Null, Scenario::PositiveRoot, Scenario::NegativeRoot];

    fn label(self) -> &'static str {
        match self {
            Scenario::Null => "H0",
            Scenario::PositiveRoot => "H1+",
            Scenario::NegativeRoot => "H1-",
        }
    }

    fn index(self) -> u64 {
        self as u64
    }
}

/// Path `replication` of a scenario. Streams are indexed by replication so
/// the path does not depend on which worker simulates it.
pub fn scenario_path(cfg: &ExperimentConfig, scenario: Scenario, replication: u64) -> DgpConfig {
    let seed = derive_seed(cfg.seed, scenario.index());
    let (d, rho, sigma_eta) = match scenario {
        Scenario::Null => (0, UnitRoot::Plus, 0.0),
        Scenario::PositiveRoot => (1, UnitRoot::Plus, cfg.sigma_eta),
        Scenario::NegativeRoot => (1, UnitRoot::Minus, cfg.sigma_eta),
    };
    let mut alpha = cfg.trend_coef.clone();
    if !cfg.trend.kappa_zero {
        alpha.resize(cfg.trend.r + 1, 0.0);
    }
    DgpConfig {
        theta: cfg.theta.clone(),
        kappa_zero: cfg.trend.kappa_zero,
        alpha,
        rho,
        d,
        eps_noise: NoiseSpec::gaussian(cfg.sigma_eps, seed, 2 * replication),
        eta_noise: NoiseSpec::gaussian(sigma_eta, seed, 2 * replication + 1),
        len: cfg.len,
        burn_in: 0,
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    kpss: Option<bool>,
    lmc: Option<bool>,
    corrected: Option<bool>,
}

fn replicate_one(cfg: &ExperimentConfig, table: &QuantileTable, scenario: Scenario, i: u64) -> Outcome {
    let Ok(path) = simulate_dgp(&scenario_path(cfg, scenario, i)) else {
        return Outcome::default();
    };
    let y = path.as_slice();
    let mut out = Outcome::default();
    if cfg.procedures.contains(&Procedure::Kpss) {
        out.kpss = run_kpss_pipeline(y, cfg.trend, cfg.bandwidth)
            .and_then(|k| decide(k.statistic, cfg.trend, table, Rule::Classic, cfg.alpha))
            .ok()
            .map(|r| r.reject);
    }
    let needs_lmc = cfg.procedures.contains(&Procedure::Lmc) || cfg.procedures.contains(&Procedure::Corrected);
    if needs_lmc {
        if let Ok((stat, _)) = run_test_pipeline(y, cfg.theta.len(), cfg.trend) {
            if cfg.procedures.contains(&Procedure::Lmc) {
                out.lmc = decide(stat.k_hat, cfg.trend, table, Rule::Classic, cfg.alpha).ok().map(|r| r.reject);
            }
            if cfg.procedures.contains(&Procedure::Corrected) {
                out.corrected = decide(stat.k_hat, cfg.trend, table, Rule::Corrected, cfg.alpha).ok().map(|r| r.reject);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionRate {
    pub hypothesis: Scenario,
    pub procedure: Procedure,
    pub rejections: usize,
    pub completed: usize,
    pub failed: usize,
    pub percent: f64,
    /// Binomial standard error, in percentage points.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub null_table: TableProvenance,
    pub results: Vec<RejectionRate>,
}

impl ReplicationReport {
    pub fn rate(&self, hypothesis: Scenario, procedure: Procedure) -> Option<&RejectionRate> {
        self.results.iter().find(|r| r.hypothesis == hypothesis && r.procedure == procedure)
    }

    pub fn to_text(&self) -> String {
        let procs: Vec<Procedure> = self.config.procedures.iter().copied().collect();
        let mut out = format!(
            "Rejection of trend-stationarity, {} replications, T = {}, alpha = {}\n\n{:<6}",
            self.config.n_rep, self.config.len, self.config.alpha, ""
        );
        for p in &procs {
            out.push_str(&format!("{:>18}", p.label()));
        }
        out.push('\n');
        for s in Scenario::ALL {
            out.push_str(&format!("{:<6}", s.label()));
            for p in &procs {
                let cell =
                    self.rate(s, *p).map(|r| format!("{:6.2} % (±{:.2})", r.percent, r.std_error)).unwrap_or_default();
                out.push_str(&format!("{cell:>18}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Zero workers means every available core.
fn execution(workers: usize) -> Execution {
    match workers {
        0 => Execution::Parallel,
        w => Execution::with_workers(w),
    }
}

pub fn null_table(cfg: &ExperimentConfig, cache: &TableCache) -> Result<QuantileTable> {
    let key = TableKey {
        id: FunctionalId::h0(cfg.trend),
        grid: cfg.table_grid,
        n_rep: cfg.table_n_rep,
        seed: cfg.table_seed,
    };
    let (table, _) = cache.get_or_build(&key, execution(cfg.workers))?;
    Ok(table)
}

pub fn replicate(cfg: &ExperimentConfig, table: &QuantileTable) -> Result<ReplicationReport> {
    cfg.validate()?;
    let exec = execution(cfg.workers);
    let mut results = Vec::new();
    for scenario in Scenario::ALL {
        let outcomes = map_indexed(cfg.n_rep, exec, |i| replicate_one(cfg, table, scenario, i as u64));
        for &procedure in &cfg.procedures {
            let picks: Vec<Option<bool>> = outcomes
                .iter()
                .map(|o| match procedure {
                    Procedure::Kpss => o.kpss,
                    Procedure::Lmc => o.lmc,
                    Procedure::Corrected => o.corrected,
                })
                .collect();
            let completed = picks.iter().flatten().count();
            let rejections = picks.iter().flatten().filter(|&&r| r).count();
            let share = if completed > 0 { rejections as f64 / completed as f64 } else { 0.0 };
            let std_error = if completed > 0 { (share * (1.0 - share) / completed as f64).sqrt() * 100.0 } else { 0.0 };
            results.push(RejectionRate {
                hypothesis: scenario,
                procedure,
                rejections,
                completed,
                failed: cfg.n_rep - completed,
                percent: share * 100.0,
                std_error,
            });
        }
    }
    Ok(ReplicationReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        null_table: TableProvenance::from(table),
        results,
    })
}

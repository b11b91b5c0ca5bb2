//! Command implementations, returning their standard output and exit code
//! so they can be driven from tests as well as from `main`.

use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;
use trendstat::arima::default_bandwidth;
use trendstat::kstat::run_kpss_pipeline;
use trendstat::limit::{FunctionalSampler, DEFAULT_GRID, DEFAULT_REPLICATIONS};
use trendstat::parallel::{map_indexed, Execution};
use trendstat::{
    approximate_p_value, decide, run_test_pipeline, simulate_dgp, DgpConfig, FunctionalId, PValue, Rule, TableCache,
    TableKey, TestReport, TrendSpec, UnitRoot,
};

use crate::histogram::{histogram, to_csv};
use crate::ingest::{ingest_csv, MIN_TEST_LEN};
use crate::SCHEMA_VERSION;

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REJECT: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub stdout: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit_code: EXIT_ACCEPT }
    }
}

/// Parameters of the null table a command relies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableParams {
    pub grid: usize,
    pub n_rep: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TableParams {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID, n_rep: DEFAULT_REPLICATIONS, seed: 1, workers: 0 }
    }
}

impl TableParams {
    pub fn key(&self, id: FunctionalId) -> TableKey {
        TableKey { id, grid: self.grid, n_rep: self.n_rep, seed: self.seed }
    }

    pub fn execution(&self) -> Execution {
        match self.workers {
            0 => Execution::Parallel,
            w => Execution::with_workers(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestProcedure {
    Lmc,
    Kpss,
}

#[derive(Debug, Clone)]
pub struct TestArgs {
    pub path: PathBuf,
    pub p: usize,
    pub trend: TrendSpec,
    pub rule: Rule,
    pub alpha: f64,
    pub procedure: TestProcedure,
    pub bandwidth: Option<usize>,
    pub table: TableParams,
}

#[derive(Debug, Serialize)]
struct FitDiagnostics {
    theta_check: Vec<f64>,
    beta_check: Option<f64>,
    sigma_xi2: Option<f64>,
    converged: bool,
    iterations: usize,
    projected: bool,
}

#[derive(Debug, Serialize)]
struct SeriesInfo {
    source: Option<String>,
    len: usize,
}

#[derive(Debug, Serialize)]
struct TestOutput {
    schema_version: u32,
    series: SeriesInfo,
    procedure: &'static str,
    trend: TrendSpec,
    p: usize,
    statistic: f64,
    k_over_t: Option<f64>,
    t_times_k: Option<f64>,
    bandwidth: Option<usize>,
    report: TestReport,
    p_value: PValue,
    fit: Option<FitDiagnostics>,
    table_cache_hit: bool,
}

pub fn cmd_test(args: &TestArgs, cache: &TableCache) -> Result<CommandOutput> {
    let series = ingest_csv(&args.path, MIN_TEST_LEN)?;
    let y = series.as_slice();
    let (statistic, k_over_t, t_times_k, bandwidth, fit, procedure) = match args.procedure {
        TestProcedure::Lmc => {
            let (stat, fit) = run_test_pipeline(y, args.p, args.trend)?;
            let diag = fit.arima.map(|a| FitDiagnostics {
                theta_check: a.theta_check,
                beta_check: Some(a.beta_check),
                sigma_xi2: Some(a.sigma_xi2),
                converged: a.converged,
                iterations: a.iterations,
                projected: a.projected,
            });
            (stat.k_hat, Some(stat.k_over_t), Some(stat.t_times_k), None, diag, "lmc")
        }
        TestProcedure::Kpss => {
            if args.p > 0 {
                bail!("the kpss procedure does not fit an AR part; use --p 0");
            }
            let bw = args.bandwidth.unwrap_or_else(|| default_bandwidth(y.len()));
            let k = run_kpss_pipeline(y, args.trend, Some(bw))?;
            (k.statistic, None, None, Some(bw), None, "kpss")
        }
    };
    let (table, hit) = cache.get_or_build(&args.table.key(FunctionalId::h0(args.trend)), args.table.execution())?;
    let report = decide(statistic, args.trend, &table, args.rule, args.alpha)?;
    let p_value = approximate_p_value(statistic, args.trend, &table, args.rule)?;
    let exit_code = if report.reject { EXIT_REJECT } else { EXIT_ACCEPT };
    let out = TestOutput {
        schema_version: SCHEMA_VERSION,
        series: SeriesInfo { source: series.source.clone(), len: series.len() },
        procedure,
        trend: args.trend,
        p: args.p,
        statistic,
        k_over_t,
        t_times_k,
        bandwidth,
        report,
        p_value,
        fit,
        table_cache_hit: hit,
    };
    Ok(CommandOutput { stdout: serde_json::to_string_pretty(&out)? + "\n", exit_code })
}

/// Draws of a null functional binned into a CSV histogram.
pub fn cmd_histogram(trend: TrendSpec, bins: usize, n_draws: usize, params: TableParams) -> Result<CommandOutput> {
    if bins == 0 {
        bail!("need at least one bin");
    }
    let sampler = FunctionalSampler::new(FunctionalId::h0(trend), params.grid)?;
    let draws = map_indexed(n_draws, params.execution(), |i| sampler.draw(params.seed, i as u64));
    Ok(CommandOutput::ok(to_csv(&histogram(&draws, bins))))
}

#[derive(Debug, Clone)]
pub enum TableAction {
    Build(TableKey),
    List,
    Show(TableKey),
}

pub fn cmd_table(action: &TableAction, cache: &TableCache, workers: usize) -> Result<CommandOutput> {
    let exec = TableParams { workers, ..TableParams::default() }.execution();
    match action {
        TableAction::Build(key) => {
            let (table, hit) = cache.get_or_build(key, exec)?;
            let status = if hit { "cache hit" } else { "built" };
            Ok(CommandOutput::ok(format!(
                "{status}: {} (mean {:.6}) at {}\n",
                table.id,
                table.mean,
                cache.path_for(key).display()
            )))
        }
        TableAction::List => {
            let mut out = String::new();
            for (path, table) in cache.list()? {
                match table {
                    Ok(t) => out.push_str(&format!(
                        "{}\t{}\tgrid_T={}\tn_rep={}\tseed={}\n",
                        path.display(),
                        t.id,
                        t.grid,
                        t.n_rep,
                        t.seed
                    )),
                    Err(e) => out.push_str(&format!("{}\tERROR: {e}\n", path.display())),
                }
            }
            if out.is_empty() {
                out = format!("no tables in {}\n", cache.dir().display());
            }
            Ok(CommandOutput::ok(out))
        }
        TableAction::Show(key) => {
            let t = cache.load(key)?;
            let mut out = format!("{}\ngrid_T={} n_rep={} seed={} mean={}\n", t.id, t.grid, t.n_rep, t.seed, t.mean);
            for (p, v) in &t.quantiles {
                out.push_str(&format!("{p:>6}  {v:.6}\n"));
            }
            Ok(CommandOutput::ok(out))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimScenario {
    Null,
    PositiveRoot,
    NegativeRoot,
}

/// Writes one simulated path as a single-column CSV.
pub fn cmd_simulate(
    scenario: SimScenario,
    len: usize,
    p_theta: &[f64],
    sigma_eta: f64,
    seed: u64,
) -> Result<CommandOutput> {
    let (rho, d) = match scenario {
        SimScenario::Null => (UnitRoot::Plus, 0),
        SimScenario::PositiveRoot => (UnitRoot::Plus, 1),
        SimScenario::NegativeRoot => (UnitRoot::Minus, 1),
    };
    let mut cfg = DgpConfig::simple(len, rho, d, if d == 0 { 0.0 } else { sigma_eta }, seed, 0);
    cfg.theta = p_theta.to_vec();
    let y = simulate_dgp(&cfg)?;
    let mut out = String::from("value\n");
    for v in &y.values {
        out.push_str(&format!("{v}\n"));
    }
    Ok(CommandOutput::ok(out))
}

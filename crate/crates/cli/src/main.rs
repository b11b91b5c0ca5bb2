use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use trendstat::{FunctionalId, Rule, TableCache, TrendSpec};
use trendstat_cli::commands::{
    cmd_histogram, cmd_simulate, cmd_table, cmd_test, CommandOutput, SimScenario, TableAction, TableParams, TestArgs,
    TestProcedure, EXIT_ERROR,
};
use trendstat_cli::config::ExperimentConfig;
use trendstat_cli::replicate::{null_table, replicate};

#[derive(Parser)]
#[command(name = "trendstat", version, about = "Stationarity tests against unit-root integration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrendArg {
    None,
    Poly,
}

#[derive(Clone, Copy, ValueEnum)]
enum NullArg {
    Kappa0,
    Poly,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Classic,
    Corrected,
    Upper,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcedureArg {
    Lmc,
    Kpss,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    H0,
    H1plus,
    H1minus,
}

#[derive(Args, Clone, Copy)]
struct TableOpts {
    /// Discretization length of the null table.
    #[arg(long = "grid", default_value_t = trendstat::limit::DEFAULT_GRID)]
    grid: usize,
    /// Replications behind the null table.
    #[arg(long = "n-rep", default_value_t = trendstat::limit::DEFAULT_REPLICATIONS)]
    n_rep: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl TableOpts {
    fn params(self) -> TableParams {
        TableParams { grid: self.grid, n_rep: self.n_rep, seed: self.seed, workers: self.workers }
    }
}

#[derive(Args, Clone, Copy)]
struct NullSelect {
    #[arg(long = "null", value_enum, default_value = "kappa0")]
    null: NullArg,
    #[arg(long, default_value_t = 0)]
    r: usize,
}

impl NullSelect {
    fn trend(self) -> TrendSpec {
        match self.null {
            NullArg::Kappa0 => TrendSpec::none(),
            NullArg::Poly => TrendSpec::poly(self.r),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test a series read from a CSV file. Exit code 0 accepts, 2 rejects.
    Test {
        csv: PathBuf,
        #[arg(long, default_value_t = 0)]
        p: usize,
        #[arg(long, value_enum, default_value = "none")]
        trend: TrendArg,
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, value_enum, default_value = "corrected")]
        rule: RuleArg,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "lmc")]
        procedure: ProcedureArg,
        /// KPSS bandwidth; defaults to floor(4 (T/100)^(1/4)).
        #[arg(long)]
        bandwidth: Option<usize>,
        #[command(flatten)]
        table: TableOpts,
    },
    /// Rejection rates over simulated paths under H0, H1+ and H1-.
    Replicate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Print the aligned text table instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Histogram of the null limiting law as CSV.
    Hist {
        #[command(flatten)]
        null: NullSelect,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long = "draws", default_value_t = 50_000)]
        draws: usize,
        #[command(flatten)]
        table: TableOpts,
    },
    /// Manage cached quantile tables.
    Table {
        #[command(subcommand)]
        action: TableCmd,
    },
    /// Write a simulated path as CSV.
    Simulate {
        #[arg(long, value_enum, default_value = "h0")]
        scenario: ScenarioArg,
        #[arg(long = "len", default_value_t = 300)]
        len: usize,
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma_eta: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    Build {
        #[command(flatten)]
        null: NullSelect,
        #[command(flatten)]
        table: TableOpts,
    },
    List,
    Show {
        #[command(flatten)]
        null: NullSelect,
        #[command(flatten)]
        table: TableOpts,
    },
}

fn run(cli: Cli) -> Result<CommandOutput> {
    let cache = TableCache::from_env();
    match cli.command {
        Command::Test { csv, p, trend, r, rule, alpha, procedure, bandwidth, table } => {
            let args = TestArgs {
                path: csv,
                p,
                trend: match trend {
                    TrendArg::None => TrendSpec::none(),
                    TrendArg::Poly => TrendSpec::poly(r),
                },
                rule: match rule {
                    RuleArg::Classic => Rule::Classic,
                    RuleArg::Corrected => Rule::Corrected,
                    RuleArg::Upper => Rule::UpperOnly,
                    RuleArg::Lower => Rule::LowerOnly,
                },
                alpha,
                procedure: match procedure {
                    ProcedureArg::Lmc => TestProcedure::Lmc,
                    ProcedureArg::Kpss => TestProcedure::Kpss,
                },
                bandwidth,
                table: table.params(),
            };
            cmd_test(&args, &cache)
        }
        Command::Replicate { config, seed, workers, text } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let table = null_table(&cfg, &cache)?;
            let report = replicate(&cfg, &table)?;
            let json = serde_json::to_string_pretty(&report)? + "\n";
            if let Some(path) = &cfg.output_path {
                std::fs::write(path, &json)?;
            }
            let stdout = if text { report.to_text() } else { json };
            Ok(CommandOutput { stdout, exit_code: 0 })
        }
        Command::Hist { null, bins, draws, table } => cmd_histogram(null.trend(), bins, draws, table.params()),
        Command::Table { action } => {
            let (action, workers) = match action {
                TableCmd::Build { null, table } => {
                    (TableAction::Build(table.params().key(FunctionalId::h0(null.trend()))), table.workers)
                }
                TableCmd::List => (TableAction::List, 0),
                TableCmd::Show { null, table } => {
                    (TableAction::Show(table.params().key(FunctionalId::h0(null.trend()))), table.workers)
                }
            };
            cmd_table(&action, &cache, workers)
        }
        Command::Simulate { scenario, len, theta, sigma_eta, seed } => {
            let scenario = match scenario {
                ScenarioArg::H0 => SimScenario::Null,
                ScenarioArg::H1plus => SimScenario::PositiveRoot,
                ScenarioArg::H1minus => SimScenario::NegativeRoot,
            };
            cmd_simulate(scenario, len, &theta, sigma_eta, seed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

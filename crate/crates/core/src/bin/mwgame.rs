//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 resource limit, 4 regret bound
//! violated, 5 pde-check failed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mw_adversary::asymptotics::{
    bounds_report, convergence_study, residual_sweep, tangential_hamiltonian, write_convergence_csv,
};
use mw_adversary::dp::{write_table_csv, DpSolver};
use mw_adversary::model::validate_params;
use mw_adversary::output::json_num;
use mw_adversary::sim::{episode_seed, run_batch, run_episode, BatchSummary, ForecasterKind};
use mw_adversary::{Error, Strategy};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "mwgame",
    version,
    about = "Malicious expert vs multiplicative weights"
)]
struct Cli {
    /// Print numbers with full double precision instead of 9 significant digits.
    #[arg(long, global = true)]
    full_precision: bool,

    /// Echo the resolved flags as JSON on standard error.
    #[arg(long, global = true)]
    emit_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Exact value V(N, rho0) against fixed-eps weights.
    Dp {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        horizon: i64,
        #[arg(long)]
        rho0: f64,
        /// Write the value/policy table as CSV (needs --out).
        #[arg(long, requires = "out")]
        policy: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo batch of one strategy against one forecaster.
    Simulate {
        #[arg(long, value_enum)]
        forecaster: ForecasterArg,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        horizon: i64,
        #[arg(long, default_value_t = 0.5)]
        rho0: f64,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the batch summary JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-round trace of episode 0 as CSV.
        #[arg(long, value_name = "FILE")]
        log_episodes: Option<PathBuf>,
    },
    /// Closed-form lower and upper per-round bounds.
    Bounds {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        rho: f64,
    },
    /// V(N, rho0)/N over a ladder of horizons, as CSV.
    Converge {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        rho0: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual of the closed-form limit and the interface Hamiltonian.
    PdeCheck {
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1001)]
        resolution: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ForecasterArg {
    Mw,
    Adaptive,
    AdaptiveIncremental,
}

impl From<ForecasterArg> for ForecasterKind {
    fn from(f: ForecasterArg) -> Self {
        match f {
            ForecasterArg::Mw => ForecasterKind::FixedMw,
            ForecasterArg::Adaptive => ForecasterKind::AdaptiveMw,
            ForecasterArg::AdaptiveIncremental => ForecasterKind::AdaptiveMwIncremental,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyArg {
    Lie,
    Truth,
    TwoState,
    DpPolicy,
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    RegretViolation(usize),
    CheckFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Domain(_) | Error::State(_) | Error::Contract(_)) => 2,
            Failure::Lib(Error::Resource(_)) => 3,
            Failure::Lib(Error::Index(_)) | Failure::Io(_) => 1,
            Failure::RegretViolation(_) => 4,
            Failure::CheckFailed(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => format!("i/o error: {e}"),
            Failure::RegretViolation(n) => format!("{n} episode(s) exceeded the regret bound"),
            Failure::CheckFailed(m) => m.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.emit_config {
        eprintln!("{}", serde_json::to_string(&cli).expect("flags serialise"));
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mwgame: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new)
}

fn print_json(value: &serde_json::Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let full = cli.full_precision;
    let num = |x: f64| json_num(x, full);
    match &cli.command {
        Command::Dp {
            mu,
            eps,
            horizon,
            rho0,
            policy,
            out,
        } => {
            let params = validate_params(*mu, *eps, *horizon, *rho0)?;
            let solver = if *policy {
                DpSolver::new()
            } else {
                DpSolver::new().value_only()
            };
            let sol = solver.solve(&params)?;
            let value = sol.values.start_value();
            if let (true, Some(path)) = (*policy, out) {
                let mut w = create(path)?;
                write_table_csv(&mut w, &sol.values, sol.policy.as_ref(), full)?;
                w.flush()?;
            }
            print_json(&json!({
                "mu": params.mu,
                "eps": params.eps,
                "horizon": params.horizon,
                "rho0": params.rho0,
                "value": num(value),
                "avg_value": num(value / params.horizon as f64),
            }))?;
            Ok(())
        }
        Command::Simulate {
            forecaster,
            strategy,
            mu,
            eps,
            horizon,
            rho0,
            reps,
            seed,
            out,
            log_episodes,
        } => {
            let params = validate_params(*mu, *eps, *horizon, *rho0)?;
            let kind = ForecasterKind::from(*forecaster);
            if *strategy == StrategyArg::TwoState && kind.is_adaptive() {
                return Err(Error::Contract(
                    "--strategy two-state is only defined against --forecaster mw".into(),
                )
                .into());
            }
            if *reps < 1 {
                return Err(Error::Domain("--reps must be at least 1".into()).into());
            }
            let strategy = match strategy {
                StrategyArg::Lie => Strategy::AlwaysLie,
                StrategyArg::Truth => Strategy::AlwaysTruth,
                StrategyArg::TwoState => Strategy::TwoState,
                StrategyArg::DpPolicy => {
                    let sol = DpSolver::new().solve(&params)?;
                    Strategy::dp_policy(sol.policy.expect("policy requested"))
                }
            };
            let stats = run_batch(kind, &strategy, &params, *reps, *seed)?;
            if let Some(path) = log_episodes {
                let episode = run_episode(kind, &strategy, &params, episode_seed(*seed, 0))?;
                let mut w = create(path)?;
                episode.write_log_csv(&mut w, full)?;
                w.flush()?;
            }
            let mut summary = BatchSummary::new(kind, &strategy, &params, *seed, &stats);
            summary.mean_avg_loss = num(summary.mean_avg_loss);
            summary.stderr = num(summary.stderr);
            let text = serde_json::to_string(&summary).expect("summary serialises");
            match out {
                Some(path) => {
                    let mut w = create(path)?;
                    writeln!(w, "{text}")?;
                    w.flush()?;
                }
                None => println!("{text}"),
            }
            if stats.regret_violations > 0 {
                return Err(Failure::RegretViolation(stats.regret_violations));
            }
            Ok(())
        }
        Command::Bounds { mu, eps, rho } => {
            let r = bounds_report(*mu, *eps, *rho)?;
            print_json(&json!({
                "mu": r.mu,
                "eps": r.eps,
                "rho": r.rho,
                "lower": num(r.lower),
                "upper": num(r.upper),
                "pde_value_at_origin": num(r.pde_value_at_origin),
            }))?;
            Ok(())
        }
        Command::Converge {
            mu,
            eps,
            rho0,
            horizons,
            out,
        } => {
            let rows = convergence_study(*mu, *eps, *rho0, horizons)?;
            match out {
                Some(path) => {
                    let mut w = create(path)?;
                    write_convergence_csv(&mut w, &rows, *mu, *eps, *rho0, full)?;
                    w.flush()?;
                }
                None => write_convergence_csv(io::stdout().lock(), &rows, *mu, *eps, *rho0, full)?,
            }
            Ok(())
        }
        Command::PdeCheck {
            mu,
            samples,
            resolution,
            seed,
        } => {
            let sweep = residual_sweep(*mu, *samples, *seed)?;
            let tangential = tangential_hamiltonian(*mu, *resolution)?;
            let target = 1.0 - mu * mu;
            let error = (tangential.value - target).abs();
            let passed = sweep.max_abs_residual <= 1e-12 && error <= 2.0 / *resolution as f64;
            print_json(&json!({
                "mu": mu,
                "samples": sweep.samples,
                "max_abs_residual": num(sweep.max_abs_residual),
                "resolution": resolution,
                "tangential_hamiltonian": num(tangential.value),
                "maximizer": [num(tangential.alpha1), num(tangential.alpha2), num(tangential.c)],
                "one_minus_mu_squared": num(target),
                "tangential_error": num(error),
                "passed": passed,
            }))?;
            if passed {
                Ok(())
            } else {
                Err(Failure::CheckFailed("pde check failed".into()))
            }
        }
    }
}

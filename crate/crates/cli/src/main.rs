mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use choquet_core::operators::OperatorRegistry;
use clap::{Args, Parser, Subcommand};

use commands::Suite;
use config::{Command, ExperimentConfig, Overrides};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "choquet",
    version,
    about = "Choquet integrals and Choquet-type approximation operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Choquet integral by both engine paths and their difference
    Integrate(Common),
    /// Error table of one operator over the n list and x grid
    Operator(Common),
    /// Randomized property suites; exits 1 on any violation
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        /// Random instances per suite
        #[arg(long)]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Classical operator against its Choquet counterpart
    Compare(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    operator: Option<String>,
    /// possibility, sqrt, lebesgue, or inline JSON
    #[arg(long, allow_hyphen_values = true)]
    capacity: Option<String>,
    /// Registry name or inline JSON
    #[arg(long)]
    function: Option<String>,
    /// Comma-separated degrees
    #[arg(long = "n")]
    n: Option<String>,
    /// min:max:count
    #[arg(long, allow_hyphen_values = true)]
    xgrid: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    i0: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self, trials: Option<usize>) -> Overrides {
        Overrides {
            operator: self.operator.clone(),
            capacity: self.capacity.clone(),
            function: self.function.clone(),
            n: self.n.clone(),
            xgrid: self.xgrid.clone(),
            theta: self.theta,
            i0: self.i0,
            seed: self.seed,
            out: self.out.clone(),
            trials,
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let registry = OperatorRegistry::standard();
    let (cmd, common, trials) = match &cli.command {
        Cmd::Integrate(c) => (Command::Integrate, c, None),
        Cmd::Operator(c) => (Command::Operator, c, None),
        Cmd::Verify { common, trials, .. } => (Command::Verify, common, *trials),
        Cmd::Compare(c) => (Command::Compare, c, None),
    };
    let cfg = ExperimentConfig::load(common.config.as_deref(), &common.overrides(trials))?;
    cfg.validate(cmd, &registry)?;
    let out = cfg.out.as_deref();
    match &cli.command {
        Cmd::Integrate(_) => commands::integrate(&cfg)?.emit(out)?,
        Cmd::Operator(_) => commands::operator(&cfg, &registry)?.emit(out)?,
        Cmd::Compare(_) => commands::compare(&cfg, &registry)?.emit(out)?,
        Cmd::Verify { suite, .. } => {
            let report = commands::verify(*suite, &cfg, &registry)?;
            report.table.emit(out)?;
            if report.violations > 0 {
                eprintln!(
                    "{} violation(s) in {} check(s)",
                    report.violations,
                    report.table.len()
                );
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use anyhow::Context;
use clap::{Parser, Subcommand};
use cnsm_cli::{run, CliError, Command, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cnsm", version, about = "Mild-solution lab for chemotaxis-fluid systems")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Refines the spatial grid and the time grid by this factor.
    #[arg(long, global = true, default_value_t = 1)]
    refine: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Picard iteration for the configured data.
    Simulate,
    /// Semigroup decay envelopes over the random corpus.
    VerifyDecay,
    /// Damped beta-function bound over a random parameter grid.
    VerifyBeta,
    /// Exponent conditions of a theorem case.
    CheckExponents,
    /// Bisection for the small-data threshold.
    ThresholdSearch,
    /// Exponential decay rates of a decay-mode run.
    FitRates,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::VerifyDecay => Command::VerifyDecay,
            Sub::VerifyBeta => Command::VerifyBeta,
            Sub::CheckExponents => Command::CheckExponents,
            Sub::ThresholdSearch => Command::ThresholdSearch,
            Sub::FitRates => Command::FitRates,
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let cfg = cfg.refined(cli.refine)?;
    let verdict = run(cli.command.into(), &cfg, &cli.out)
        .with_context(|| format!("running into {}", cli.out.display()))?;
    print!("{}", verdict.render());
    Ok(verdict.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let code = err.downcast_ref::<CliError>().map_or(70, CliError::exit_code);
            let category = err.downcast_ref::<CliError>().map_or("internal", CliError::category);
            eprintln!("error [{category}]: {err:#}");
            ExitCode::from(code as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eelab::experiments::{self, preset, Command, ExperimentConfig};
use eelab::{Error, Result};

/// Equi-energy, parallel-tempering and Metropolis experiments on the circle
/// and the interval.
#[derive(Debug, Parser)]
#[command(name = "eelab", version = experiments::BUILD)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// TOML experiment config.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Shipped config by name (the command's default when neither is given).
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Overrides experiment.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (all cores by default).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory, or a .csv path for the main table.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 3 when a check fails.
    #[arg(long, global = true)]
    check: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Write full traces of a multi-level run.
    Simulate,
    /// Variance of the running average in the uniform example.
    VerifyVariance,
    /// Lagged products in the uniform example.
    VerifyAutocov,
    /// Autocorrelation decay of ee, pt and mh on the square-tooth target.
    CompareAutocov,
    /// Distance between empirical and limiting equi-energy kernels.
    KernelDistance,
    /// Empirical tails against the concentration bound.
    Concentration,
    /// Relaxation times, bottlenecks and curvature quantities.
    CurvatureReport,
    /// Burn-in schedule from the convergence constants.
    GoodSequence,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::VerifyVariance => Command::VerifyVariance,
            Sub::VerifyAutocov => Command::VerifyAutocov,
            Sub::CompareAutocov => Command::CompareAutocov,
            Sub::KernelDistance => Command::KernelDistance,
            Sub::Concentration => Command::Concentration,
            Sub::CurvatureReport => Command::CurvatureReport,
            Sub::GoodSequence => Command::GoodSequence,
        }
    }
}

fn load(cli: &Cli, command: Command) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_toml(&text)?
        }
        (None, Some(name)) => preset(name)?,
        (None, None) => preset(command.default_preset())?,
    };
    if let Some(seed) = cli.seed {
        cfg.experiment.seed = Some(seed);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = Command::from(cli.command);
    let outcome = load(&cli, command).and_then(|cfg| {
        let report = experiments::run(command, &cfg, cli.jobs)?;
        if let Some(out) = &cli.out {
            report.write(out)?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            println!("{}", report.line);
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("{c}");
            }
            if cli.check && !report.passed() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("eelab {command}: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}

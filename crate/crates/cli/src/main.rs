//! `qbm`: decoherence curves, spectral densities, sweeps and the
//! validation suite from flat key=value configs.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qbm_core::validation::Level;

use crate::commands::Kind;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qbm", version, about = "Decoherence of a charged oscillator in a magnetic field coupled to a bosonic bath")]
struct Cli {
    /// Worker threads for sweep points and curve evaluation.
    #[arg(long, global = true, env = "QBM_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// |rho(t)/rho(0)| and lambda_1,2 on a time grid, as CSV. Configs with
    /// swept keys write a directory like `sweep`.
    Curve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// J(w) of the three cutoff models, as CSV.
    Spectra {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One curve per point of the swept keys, plus manifest.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance and oracle checks; exit 1 if any fails.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Curve { config, out } => commands::single(Kind::Curve, &config, out),
        Command::Spectra { config, out } => commands::single(Kind::Spectra, &config, out),
        Command::Sweep { config, out } => commands::sweep(Kind::Curve, &config, out),
        Command::Validate { level, out } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            commands::validate(level, out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(msg) => {
            eprintln!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qbm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use brokensym::config::{ExperimentConfig, JobKind, Severity};
use brokensym::run::{run, RunError, OUTPUT_DIR_ENV};
use clap::{Args, Parser, Subcommand};

/// Quench dynamics of symmetry-broken ground states in free-fermion spin chains.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML experiment config.
    config: PathBuf,
    /// Replace a config value, e.g. `time.dt=0.1` or `model_final.h=0.9`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the job named in the config.
    Run {
        #[command(flatten)]
        args: ConfigArgs,
        /// Worker threads (0 = all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Emit samples past the validity horizon instead of withholding them.
        #[arg(long)]
        allow_unconverged: bool,
    },
    /// Report every validation finding without running anything.
    Validate {
        #[command(flatten)]
        args: ConfigArgs,
    },
    /// Compare the pipeline against exact diagonalization on a finite ring.
    CompareOracle {
        #[command(flatten)]
        args: ConfigArgs,
    },
}

fn load(args: &ConfigArgs) -> Result<ExperimentConfig, ExitCode> {
    let mut config = ExperimentConfig::load(&args.config, &args.overrides).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        config.output_dir = PathBuf::from(dir);
    }
    Ok(config)
}

fn execute(config: &ExperimentConfig) -> ExitCode {
    for w in config.validate().iter().filter(|v| v.severity == Severity::Warning) {
        eprintln!("{w}");
    }
    match run(config) {
        Ok(outcome) => {
            let m = &outcome.manifest;
            for note in &m.notes {
                eprintln!("note: {note}");
            }
            if let Some(e) = &m.error {
                eprintln!("error: {e}");
            }
            println!("{:?} -> {}", m.status, outcome.output_dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(RunError::Invalid(found)) => {
            for v in &found {
                eprintln!("{v}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { args, workers, allow_unconverged } => {
            let mut config = match load(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(w) = workers {
                config.workers = w;
            }
            config.allow_unconverged |= allow_unconverged;
            execute(&config)
        }
        Command::Validate { args } => {
            let config = match load(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let found = config.validate();
            for v in &found {
                println!("{v}");
            }
            if found.iter().any(|v| v.severity == Severity::Error) {
                ExitCode::from(1)
            } else {
                println!("ok");
                ExitCode::SUCCESS
            }
        }
        Command::CompareOracle { args } => {
            let mut config = match load(&args) {
                Ok(c) => c,
                Err(code) => return code,
            };
            config.job = JobKind::OracleCompare;
            execute(&config)
        }
    }
}

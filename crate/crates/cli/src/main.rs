use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orbit_census_cli::config::ExperimentConfig;
use orbit_census_cli::{exit, run, suites, with_workers, RunError};

#[derive(Parser)]
#[command(name = "orbit-census", version, about = "Periodic-orbit census experiments")]
struct Cli {
    /// Cap on worker threads (1 runs everything on the main thread).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Directory receiving reports.
    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,
    /// Seed for randomized cross-checks (never affects counts).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config.
    Run { config: PathBuf },
    /// Run a canned suite: theorem1, theorem2 or theorem4.
    Reproduce { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(exit::CONFIG as u8);
    }
    let result: Result<Vec<PathBuf>, RunError> = with_workers(cli.workers, || match &cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(config)?;
            run::run(&cfg, &cli.out, cli.seed)
        }
        Command::Reproduce { suite } => suites::reproduce(suite, &cli.out),
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

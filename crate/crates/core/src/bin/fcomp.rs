use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fcomp::harness::commands::{self, CommandOutput, EXIT_USAGE};

/// Forecasting competitions that reward honest forecasts.
#[derive(Parser)]
#[command(name = "fcomp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one competition on reports and outcomes.
    Run {
        /// mpsr, mpsr:ties=uniform, multnorm, elf, ielf or ielf:eps=<f>
        #[arg(long)]
        mechanism: String,
        /// Scoring rule, e.g. quadratic, spherical, quadratic:lo=0:hi=10
        #[arg(long, default_value = "quadratic")]
        rule: String,
        /// CSV with header forecaster,e1,…,em
        #[arg(long)]
        reports: PathBuf,
        /// CSV with a single row of m outcomes
        #[arg(long)]
        outcomes: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Output a full ranking (ielf only)
        #[arg(long)]
        ranking: bool,
    },
    /// Estimate how often the best forecaster wins across event counts.
    Simulate {
        /// Experiment config JSON
        #[arg(long)]
        config: PathBuf,
    },
    /// Search for a profitable misreport under a belief scenario.
    Audit {
        #[arg(long)]
        mechanism: String,
        #[arg(long, default_value = "quadratic")]
        rule: String,
        /// Scenario JSON
        #[arg(long)]
        scenario: PathBuf,
        /// Report grid step; must divide 1
        #[arg(long, default_value_t = 0.01)]
        grid: f64,
        /// Seed for the Monte Carlo fallback
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Events needed for the best forecaster to win with probability pi.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        pi: f64,
    },
    /// Re-run a worked example and compare against its expected values.
    Repro {
        /// Case id or `all`
        #[arg(default_value = "all")]
        case: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dispatch(command: Command) -> fcomp::Result<CommandOutput> {
    match command {
        Command::Run {
            mechanism,
            rule,
            reports,
            outcomes,
            seed,
            ranking,
        } => commands::run(&mechanism, &rule, &reports, &outcomes, seed, ranking),
        Command::Simulate { config } => commands::simulate(&config),
        Command::Audit {
            mechanism,
            rule,
            scenario,
            grid,
            seed,
        } => commands::audit(&mechanism, &rule, &scenario, grid, seed),
        Command::Bound { n, delta, pi } => commands::bound(n, delta, pi),
        Command::Repro { case, seed } => commands::repro(&case, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out.json).expect("JSON value serialises")
            );
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("fcomp: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}

//! Command-line front end. Exit codes: 0 success, 2 parse error,
//! 3 precondition failure, 4 negative mathematical verdict, 5 internal
//! inconsistency.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hjet::commands::{
    cmd_certify, cmd_flag, cmd_invert, cmd_schedule, cmd_wcheck, exit_code, CmdResult,
};
use hjet::problem::ProblemFile;
use hjet::HjetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "hjet",
    about = "Exact certificates for curves tangent to bracket-generating distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Growth vector and bracket-generating verdict at the base point.
    Flag {
        problem: PathBuf,
        /// Stop extending the flag after this many steps.
        #[arg(long, default_value_t = 8)]
        max_step: usize,
    },
    /// Weak regularity of the problem's curve at level q.
    Wcheck {
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        q: usize,
        /// Also test membership in the order-alpha tangency class.
        #[arg(long)]
        alpha: Option<usize>,
    },
    /// Right inverse of the linearized tangency operator along the curve.
    Invert {
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        q: usize,
        /// Verify the inverse on monomials through this degree.
        #[arg(long = "bound", default_value_t = 3)]
        bound: usize,
    },
    /// Block-label and free-direction tables for a growth vector.
    Schedule {
        /// Comma-separated growth vector, e.g. 0,2,3,4.
        #[arg(long)]
        growth: String,
        #[arg(long = "K", default_value_t = 1)]
        passes: usize,
    },
    /// Full certification pipeline with a rational witness.
    Certify {
        problem: PathBuf,
        #[arg(long = "K", default_value_t = 1)]
        passes: usize,
        /// RNG seed; falls back to HJET_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        max_step: usize,
        /// Witness sampling attempts before giving up.
        #[arg(long, default_value_t = 24)]
        trials: usize,
    },
}

fn load(path: &PathBuf) -> Result<ProblemFile, HjetError> {
    ProblemFile::load(path)
}

fn seed_or_env(seed: Option<u64>) -> Result<u64, HjetError> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("HJET_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| HjetError::Parse(format!("HJET_SEED must be a u64, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn run(cmd: &Command) -> CmdResult {
    let stage = |error: HjetError| hjet::commands::StagedError {
        stage: "input",
        error,
    };
    match cmd {
        Command::Flag { problem, max_step } => {
            let p = load(problem).map_err(stage)?;
            cmd_flag(&p, *max_step)
        }
        Command::Wcheck { problem, q, alpha } => {
            let p = load(problem).map_err(stage)?;
            cmd_wcheck(&p, *q, *alpha)
        }
        Command::Invert { problem, q, bound } => {
            let p = load(problem).map_err(stage)?;
            cmd_invert(&p, *q, *bound)
        }
        Command::Schedule { growth, passes } => {
            let entries: Result<Vec<usize>, _> = growth
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| HjetError::Parse(format!("growth entry {s:?} is not a nonnegative integer")))
                })
                .collect();
            cmd_schedule(&entries.map_err(stage)?, *passes)
        }
        Command::Certify {
            problem,
            passes,
            seed,
            max_step,
            trials,
        } => {
            let p = load(problem).map_err(stage)?;
            let seed = seed_or_env(*seed).map_err(stage)?;
            cmd_certify(&p, *passes, seed, *max_step, *trials)
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> std::io::Result<()> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{text}\n")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli.command) {
        Ok(mut report) => {
            report.timing_ms = started.elapsed().as_millis();
            let rendered = match cli.format {
                Format::Json => match report.to_json() {
                    Ok(j) => j,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(5);
                    }
                },
                Format::Text => report.to_text(),
            };
            if let Err(e) = emit(&rendered, &cli.out) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(5);
            }
            if report.verdict == Some(false) {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e.error) as u8)
        }
    }
}

//! Scenario runner for the decay-certification engines.
//!
//! Exit codes encode verdicts so harnesses can script the binary:
//! 0 = pass, 1 = certified-infeasible or bound violation, 2 = parse error,
//! 3 = validation error, 4 = i/o error.

// `!(x > 0.0)` style checks are kept as written: the negated form also
// rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod pipeline;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use config::{load_scenario, Mode, Overrides};
use pipeline::run_scenario;

#[derive(Parser)]
#[command(
    name = "majorant",
    version,
    about = "Certify large-time decay bounds for dissipative evolution problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the majorant condition and cross-check the comparison equation
    Certify(RunArgs),
    /// Integrate the problem and verify it against the certified bound
    Simulate(RunArgs),
    /// Construct a majorant and initial radius from problem constants
    Synthesize(RunArgs),
    /// Check a discrete scheme and evolve its extremal recursion
    Discrete(RunArgs),
    /// Full pipeline: synthesize, certify, integrate, verify
    End2end(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario files (TOML)
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    /// Output directory; scenarios in a batch get isolated subdirectories
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the grid point count
    #[arg(long)]
    grid_points: Option<usize>,
    /// Override the grid horizon
    #[arg(long)]
    t_end: Option<f64>,
    /// Absolute slack tolerance for feasibility checks
    #[arg(long)]
    tol: Option<f64>,
    /// Run up to N scenarios concurrently
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Certify(a) => (Mode::Certify, a),
        Command::Simulate(a) => (Mode::Simulate, a),
        Command::Synthesize(a) => (Mode::Synthesize, a),
        Command::Discrete(a) => (Mode::Discrete, a),
        Command::End2end(a) => (Mode::End2end, a),
    };
    ExitCode::from(run_all(mode, args))
}

fn run_all(mode: Mode, args: &RunArgs) -> u8 {
    let overrides = Overrides {
        grid_points: args.grid_points,
        t_end: args.t_end,
        tol: args.tol,
    };
    let batch = args.scenarios.len() > 1;
    let jobs = args.jobs.max(1).min(args.scenarios.len());

    let codes = Mutex::new(vec![0u8; args.scenarios.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= args.scenarios.len() {
                    break;
                }
                let code = run_one(mode, &args.scenarios[i], args.out.as_deref(), batch, &overrides);
                codes.lock().unwrap()[i] = code;
            });
        }
    });
    let codes = codes.into_inner().unwrap();
    codes.into_iter().max().unwrap_or(0)
}

fn run_one(
    mode: Mode,
    path: &Path,
    out_flag: Option<&Path>,
    batch: bool,
    overrides: &Overrides,
) -> u8 {
    let scenario = match load_scenario(path, mode, overrides) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return e.exit_code();
        }
    };
    let base: PathBuf = out_flag
        .map(Path::to_path_buf)
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let out_dir = if batch {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| scenario.name.clone());
        base.join(stem)
    } else {
        base
    };
    match run_scenario(&scenario, &out_dir) {
        Ok(verdict) => {
            println!(
                "{}: {} (artifacts in {})",
                scenario.name,
                match verdict {
                    pipeline::Verdict::Pass => "PASS",
                    pipeline::Verdict::Fail => "FAIL",
                },
                out_dir.display()
            );
            verdict.exit_code()
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            e.exit_code()
        }
    }
}

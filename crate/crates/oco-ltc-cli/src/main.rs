use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use oco_ltc_cli::{run_experiment, Algorithm, ExperimentConfig, LossFamily};

/// Online convex optimization with long-term constraints: run a learner over
/// a horizon/seed grid and write summary CSVs with fitted growth exponents.
#[derive(Parser)]
#[command(name = "oco-ltc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm across a horizon/seed grid.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm to run.
    #[arg(long = "alg", value_enum)]
    alg: Algorithm,

    /// Decision dimension.
    #[arg(long, default_value_t = 5)]
    d: usize,

    /// Number of constraints (ignored by --loss penalty-failure, which has one).
    #[arg(long, default_value_t = 3)]
    m: usize,

    /// Comma-separated, strictly increasing horizon grid.
    #[arg(
        long = "T",
        value_delimiter = ',',
        default_value = "1000,3162,10000,31623,100000"
    )]
    horizons: Vec<u64>,

    /// Comma-separated seeds; each grid point is deterministic in its seed.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    seeds: Vec<u64>,

    /// Loss/instance family.
    #[arg(long = "loss", value_enum, default_value = "linear")]
    loss: LossFamily,

    /// Enclosing ball radius R.
    #[arg(long = "R", default_value_t = 1.0)]
    radius: f64,

    /// Inner feasible ball radius r (0 < r <= R).
    #[arg(long = "r", default_value_t = 0.2)]
    inner_radius: f64,

    /// Gradient bound for generated losses.
    #[arg(long = "grad-bound", default_value_t = 1.0)]
    grad_bound: f64,

    /// Output directory for summary.csv, warnings.csv and trace files.
    #[arg(long = "out")]
    out: PathBuf,

    /// Also write a per-round trace CSV per grid point.
    #[arg(long)]
    trace: bool,

    /// Penalty weight for the penalty baselines.
    #[arg(long = "penalty-delta", default_value_t = 0.5)]
    penalty_delta: f64,

    /// Record wall-clock runtime_ms in summary rows. Off by default: with it
    /// off, re-running an identical config yields byte-identical CSVs.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => run(args),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let cfg = ExperimentConfig {
        algorithm: args.alg,
        dim: args.d,
        num_constraints: args.m,
        horizons: args.horizons,
        seeds: args.seeds,
        loss_family: args.loss,
        radius: args.radius,
        inner_radius: args.inner_radius,
        grad_bound: args.grad_bound,
        out_dir: args.out,
        trace: args.trace,
        penalty_delta: args.penalty_delta,
        timings: args.timings,
    };
    match run_experiment(&cfg) {
        Ok(output) => {
            println!(
                "wrote {} summary rows and {} warnings to {}",
                output.summary.len(),
                output.warnings.len(),
                cfg.out_dir.display()
            );
            for w in &output.warnings {
                println!(
                    "warning: T={} seed={} skipped: {}",
                    w.horizon, w.seed, w.reason
                );
            }
            if output.exponents.is_empty() {
                println!("fitted growth exponents: need rows at 3 or more horizons");
            } else {
                println!("fitted growth exponents (mean over seeds per horizon, floor 1):");
                for (metric, slope) in &output.exponents {
                    println!("  {metric:<24} {slope:.4}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}

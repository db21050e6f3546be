use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use precision_core::traces::ZipfSpec;
use precision_lab::bounds::BoundsParams;
use precision_lab::commands;
use precision_lab::config::{
    ExperimentConfig, PartialConfig, PartialTrace, DEFAULT_ALPHA, DEFAULT_LENGTH, DEFAULT_SEED,
    DEFAULT_UNIVERSE, OUT_DIR_ENV,
};
use precision_lab::Result;

/// Heavy-hitter measurement experiments.
#[derive(Parser, Debug)]
#[command(name = "precision", version)]
struct Cli {
    /// Base seed; repetition i uses seed + i.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: $PRECISION_OUT_DIR, else .]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a synthetic Zipf trace as CSV.
    Generate {
        #[arg(long, default_value_t = DEFAULT_ALPHA, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_UNIVERSE)]
        universe: u64,
        #[arg(long, default_value_t = DEFAULT_LENGTH)]
        length: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Evaluate one algorithm over several seeds.
    Run {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Result CSV [default: <out-dir>/run.csv]
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Evaluate several algorithms over a memory grid.
    Compare {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Monte-Carlo checks of the recirculation bounds.
    Bounds {
        /// Packets in the recirculation experiment.
        #[arg(long, short = 'n', default_value_t = 1_000_000)]
        packets: usize,
        #[arg(long, default_value_t = 1024)]
        counters: usize,
        #[arg(long, short, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// Trials per geometric-sum check.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Trials per counter-growth check.
        #[arg(long, default_value_t = 10_000)]
        growth_trials: u64,
        #[arg(long, default_value_t = 1.1)]
        slack: f64,
        #[arg(long, hide = true, default_value_t = 1.0)]
        bound_scale: f64,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trace CSV instead of a generated Zipf trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    universe: Option<u64>,
    #[arg(long)]
    length: Option<usize>,
    /// Algorithm descriptor, e.g. precision(d=2,mode=pow2,delay=0,init=0).
    #[arg(long = "algorithm", short)]
    algorithms: Vec<String>,
    /// Total counters; a comma-separated grid for compare.
    #[arg(long, value_delimiter = ',')]
    counters: Vec<usize>,
    /// Recall is measured on the top k.
    #[arg(long, short)]
    k: Option<usize>,
    /// Number of repetitions.
    #[arg(long)]
    seeds: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
}

fn experiment(
    cli_seed: Option<u64>,
    cli_out: Option<PathBuf>,
    a: ExperimentArgs,
) -> Result<ExperimentConfig> {
    let base = match &a.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        trace: PartialTrace {
            file: a.trace,
            alpha: a.alpha,
            universe: a.universe,
            length: a.length,
        },
        algorithms: (!a.algorithms.is_empty()).then_some(a.algorithms),
        counters: (!a.counters.is_empty()).then_some(a.counters),
        k: a.k,
        seeds: a.seeds,
        seed: cli_seed,
        out_dir: cli_out,
        threads: a.threads,
    };
    ExperimentConfig::resolve(base.overlay(flags))
}

fn execute(cli: Cli) -> Result<()> {
    let out_dir = || {
        cli.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    };
    match cli.command {
        Command::Generate {
            alpha,
            universe,
            length,
            out,
        } => {
            let spec = ZipfSpec {
                alpha,
                universe,
                length,
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
            };
            commands::generate(&spec, &out).map(drop)
        }
        Command::Run { exp, out } => {
            let cfg = experiment(cli.seed, cli.out_dir.clone(), exp)?;
            commands::run(&cfg, out).map(drop)
        }
        Command::Compare { exp } => {
            let cfg = experiment(cli.seed, cli.out_dir.clone(), exp)?;
            commands::compare(&cfg).map(drop)
        }
        Command::Bounds {
            packets,
            counters,
            d,
            seeds,
            trials,
            growth_trials,
            slack,
            bound_scale,
        } => {
            let params = BoundsParams {
                packets,
                counters,
                d,
                seeds,
                seed: cli.seed.unwrap_or(DEFAULT_SEED),
                geometric_trials: trials,
                growth_trials,
                slack,
                scale: bound_scale,
            };
            commands::bounds(&params, &out_dir())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("precision: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

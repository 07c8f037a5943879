//! `geonav`: field queries, grids, training, benchmarks and replays.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geonav::config::RunConfig;
use geonav::Error;

#[derive(Debug, Parser)]
#[command(name = "geonav", version, about = "Geomagnetic navigation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the seven field elements and the D/I/BH gradients at a point.
    Field(FieldArgs),
    /// Sample elements on a regular grid over the configured region.
    Grid(GridArgs),
    /// Train a TD3 navigator.
    Train(TrainArgs),
    /// Run navigators on held-out tasks and write tables, distributions and traces.
    Benchmark(BenchmarkArgs),
    /// Recompute metrics from a benchmark directory's stored traces.
    Replay(ReplayArgs),
}

/// Where the run configuration comes from.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: `paper` or `desk`.
    #[arg(long, default_value = "paper")]
    preset: String,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> geonav::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::preset(&self.preset)?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[arg(long, allow_hyphen_values = true)]
    lat: f64,
    #[arg(long, allow_hyphen_values = true)]
    lon: f64,
    /// Altitude above the reference sphere, km.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alt_km: f64,
    /// Decimal year; the configured epoch when absent.
    #[arg(long)]
    epoch: Option<f64>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Nodes per axis.
    #[arg(long, default_value_t = 11)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    epoch: Option<f64>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Total episodes, counting those of a resumed checkpoint.
    #[arg(long)]
    episodes: Option<u64>,
    /// Alignment weight; 0 gives the plain TD3 ablation.
    #[arg(long)]
    zeta3: Option<f64>,
    /// Checkpoint to continue from.
    #[arg(long)]
    resume: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',', default_value = "gg-td3,td3,ga,pso,afsa")]
    methods: Vec<String>,
    /// Checkpoint for a learned method, as `name=path`. Repeatable.
    #[arg(long = "checkpoint", value_parser = parse_checkpoint)]
    checkpoints: Vec<(String, PathBuf)>,
    /// Overrides the number of held-out tasks.
    #[arg(long)]
    tasks: Option<usize>,
    /// Output directory; `<output_dir>/benchmark` when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Directory written by `benchmark`.
    #[arg(long)]
    dir: PathBuf,
    /// Where to write the recomputed CSVs; `<dir>/replay` when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_checkpoint(s: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=path, got {s:?}"))?;
    if name.is_empty() || path.is_empty() {
        return Err(format!("expected name=path, got {s:?}"));
    }
    Ok((name.to_string(), PathBuf::from(path)))
}

/// Usage and configuration problems exit with 1, everything else with 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Usage(_)
            | Error::Config(_)
            | Error::Position(_)
            | Error::Region(_)
            | Error::EpochOutOfRange { .. },
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Field(a) => commands::field(a),
        Command::Grid(a) => commands::grid(a),
        Command::Train(a) => commands::train(a),
        Command::Benchmark(a) => commands::benchmark(a),
        Command::Replay(a) => commands::replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `mcbnc`: synthetic benchmarks, fusion, consensus pruning, threshold
//! selection and graph metrics from the command line.
//!
//! Every command that writes files also writes a `manifest.json` recording
//! how it was invoked; `mcbnc rerun` replays one.

mod commands;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::ReportFormat;
use manifest::RunManifest;
use mcbnc_core::{parse_score, Score, DEFAULT_K_MAX};

#[derive(Parser)]
#[command(name = "mcbnc", version, about = "Min-cut Bayesian network consensus")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random gold DAG and perturbed copies of it.
    Synth {
        #[arg(long)]
        nodes: usize,
        /// Number of perturbed input graphs.
        #[arg(long)]
        graphs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Fuse input DAGs into their union under a common node order.
    Fuse {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Node order file, one label per line.
        #[arg(long)]
        ordering: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Fuse and prune to a consensus graph.
    Consensus {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        stop: Stop,
        #[arg(long = "kmax", default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
        #[arg(long)]
        ordering: Option<PathBuf>,
        /// Gold graph, adds an SMHD-to-gold column to the metrics.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Pick the trajectory prefix closest on average to the inputs.
    SelectTheta {
        /// Trajectory JSON written by `consensus`.
        #[arg(long = "trajectory-file")]
        trajectory: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare graphs against a reference graph.
    Metrics {
        reference: PathBuf,
        #[arg(required = true)]
        others: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Replay the command recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        /// Defaults to the manifest's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Stop {
    /// Stop once the best score exceeds this (decimal or `a/b`).
    #[arg(long, value_parser = parse_theta)]
    theta: Option<Score>,
    /// Prune until no edges remain.
    #[arg(long)]
    trajectory: bool,
}

fn parse_theta(s: &str) -> Result<Score, String> {
    parse_score(s).map_err(|e| e.to_string())
}

fn execute(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Synth {
            nodes,
            graphs,
            seed,
            out_dir,
        } => commands::synth(&commands::SynthArgs { nodes, graphs, seed }, &out_dir),
        Command::Fuse {
            inputs,
            ordering,
            out_dir,
        } => commands::fuse_cmd(&commands::FuseArgs { inputs, ordering }, &out_dir),
        Command::Consensus {
            inputs,
            stop,
            k_max,
            ordering,
            gold,
            out_dir,
        } => commands::consensus(
            &commands::ConsensusArgs {
                inputs,
                theta: if stop.trajectory { None } else { stop.theta },
                k_max,
                ordering,
                gold,
            },
            &out_dir,
        ),
        Command::SelectTheta {
            trajectory,
            inputs,
            gold,
            format,
            out_dir,
        } => {
            let text = commands::select(
                &commands::SelectArgs {
                    trajectory,
                    inputs,
                    gold,
                    format,
                },
                &out_dir,
            )?;
            print!("{text}");
            Ok(())
        }
        Command::Metrics {
            reference,
            others,
            format,
            out_dir,
        } => {
            let text = commands::metrics(
                &commands::MetricsArgs {
                    reference,
                    others,
                    format,
                },
                out_dir.as_deref(),
            )?;
            print!("{text}");
            Ok(())
        }
        Command::Rerun { manifest, out_dir } => {
            let m = RunManifest::load(&manifest)?;
            let dir = match out_dir {
                Some(d) => d,
                None => manifest.parent().map(PathBuf::from).unwrap_or_default(),
            };
            print!("{}", commands::rerun(&m, &dir)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

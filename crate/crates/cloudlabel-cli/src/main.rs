//! Batch command-line frontend wiring the pipeline stages together:
//! frame sampling, submap extraction, normal estimation, label transfer,
//! split generation, evaluation, co-occurrence analysis, and sequence
//! validation.
//!
//! Every subcommand prints a machine-readable JSON summary to stdout (and
//! optionally to `--report`). Exit codes: 0 success, 1 validation or runtime
//! failure, 2 usage error.

mod commands;
mod config;
mod report;
mod sequence;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "cloudlabel",
    about = "Multi-view 2D-to-3D semantic label transfer and dataset tooling for LiDAR sequences",
    version,
    arg_required_else_help = true
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// JSON config file whose keys mirror the long flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit frame timestamps along a trajectory (distance/heading rule).
    SampleFrames(commands::sample_frames::Args),
    /// Cut per-frame submaps out of a global cloud.
    ExtractSubmaps(commands::extract_submaps::Args),
    /// Estimate oriented surface normals for a cloud.
    EstimateNormals(commands::estimate_normals::Args),
    /// Transfer 2D label rasters onto a 3D cloud (histograms + modes).
    TransferLabels(commands::transfer_labels::Args),
    /// Generate a buffered, metric-optimized train/val/test split.
    GenSplit(commands::gen_split::Args),
    /// Restrict an optimized split by season or environment tags.
    DomainSplit(commands::domain_split::Args),
    /// 2D segmentation mIoU over paired label rasters.
    #[command(name = "eval-2d")]
    Eval2d(commands::evaluate::Args2d),
    /// 3D segmentation mIoU over paired label files.
    #[command(name = "eval-3d")]
    Eval3d(commands::evaluate::Args3d),
    /// Label co-occurrence matrix from histograms and mode labels.
    Cooccurrence(commands::cooccur::Args),
    /// Check a sequence directory for internal consistency.
    ValidateSequence(commands::validate::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLOUDLABEL_LOG", "warn"))
        .init();
    let cli = Cli::parse();

    let config = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };

    let threads = cli.threads.or(config.threads);
    let run = || dispatch(cli.command, &config);
    let result = match threads {
        Some(n) if n >= 1 => {
            match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(run),
                Err(e) => {
                    eprintln!("error: building thread pool: {e}");
                    return ExitCode::from(1);
                }
            }
        }
        _ => run(),
    };

    match result {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Runs one subcommand; `Ok(false)` means the command completed but its
/// validation verdict is FAIL.
fn dispatch(command: Command, config: &config::FileConfig) -> anyhow::Result<bool> {
    match command {
        Command::SampleFrames(args) => commands::sample_frames::run(args, config),
        Command::ExtractSubmaps(args) => commands::extract_submaps::run(args, config),
        Command::EstimateNormals(args) => commands::estimate_normals::run(args, config),
        Command::TransferLabels(args) => commands::transfer_labels::run(args, config),
        Command::GenSplit(args) => commands::gen_split::run(args, config),
        Command::DomainSplit(args) => commands::domain_split::run(args, config),
        Command::Eval2d(args) => commands::evaluate::run_2d(args, config),
        Command::Eval3d(args) => commands::evaluate::run_3d(args, config),
        Command::Cooccurrence(args) => commands::cooccur::run(args, config),
        Command::ValidateSequence(args) => commands::validate::run(args, config),
    }
}

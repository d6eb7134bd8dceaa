use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::io::read_poses_csv;
use cloudlabel_core::transfer::{sample_frames, FrameSampleRule};

use crate::config::FileConfig;
use crate::report;

#[derive(Debug, Parser)]
pub struct Args {
    /// Trajectory file (poses.csv).
    #[arg(long)]
    pub poses: PathBuf,
    /// Distance threshold between emissions, meters.
    #[arg(long)]
    pub distance_step: Option<f64>,
    /// Cumulative heading-change threshold, degrees.
    #[arg(long)]
    pub heading_step: Option<f64>,
    /// Write the emitted timestamps, one per line.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Mirror the JSON summary to a file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    poses: usize,
    rule: FrameSampleRule,
    frames: usize,
    timestamps: Vec<f64>,
}

pub fn run(args: Args, config: &FileConfig) -> anyhow::Result<bool> {
    let defaults = FrameSampleRule::default();
    let rule = FrameSampleRule {
        distance_step: args
            .distance_step
            .or(config.distance_step)
            .unwrap_or(defaults.distance_step),
        heading_step_deg: args
            .heading_step
            .or(config.heading_step)
            .unwrap_or(defaults.heading_step_deg),
    };
    let trajectory = read_poses_csv(&args.poses).context("loading poses")?;
    let timestamps = sample_frames(&trajectory, &rule);

    if let Some(path) = &args.output {
        let text: String = timestamps
            .iter()
            .map(|t| format!("{t:.6}\n"))
            .collect();
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    report::emit(
        &Summary {
            command: "sample-frames",
            poses: trajectory.len(),
            rule,
            frames: timestamps.len(),
            timestamps,
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

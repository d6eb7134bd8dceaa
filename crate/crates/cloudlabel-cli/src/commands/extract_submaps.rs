use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::io::{
    read_poses_csv, stem_for_timestamp, write_cloud_bin, write_times, BinLayout, DIR_CLOUDS,
    DIR_TIMES,
};
use cloudlabel_core::transfer::{extract_submap, SubmapSpec};

use crate::config::FileConfig;
use crate::report;
use crate::sequence::load_cloud_with_times;

#[derive(Debug, Parser)]
pub struct Args {
    /// Global cloud (.bin, world frame).
    #[arg(long)]
    pub cloud: PathBuf,
    /// Per-point observation times sidecar (.times).
    #[arg(long)]
    pub times: PathBuf,
    /// Trajectory file (poses.csv).
    #[arg(long)]
    pub poses: PathBuf,
    /// Extract at these timestamps (repeatable).
    #[arg(long = "at")]
    pub at: Vec<f64>,
    /// Or read timestamps from a file, one per line.
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Spatial radius, meters.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Temporal half-window, seconds.
    #[arg(long)]
    pub time_window: Option<f64>,
    /// Self-strike mask radius, meters.
    #[arg(long)]
    pub self_strike: Option<f64>,
    /// Output directory (Clouds/ and Times/ are created inside).
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct PerSubmap {
    stem: String,
    points: usize,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    spec: SubmapSpec,
    source_points: usize,
    submaps: Vec<PerSubmap>,
}

pub fn run(args: Args, config: &FileConfig) -> anyhow::Result<bool> {
    let defaults = SubmapSpec::default();
    let spec = SubmapSpec {
        radius: args.radius.or(config.radius).unwrap_or(defaults.radius),
        time_window: args
            .time_window
            .or(config.time_window)
            .unwrap_or(defaults.time_window),
        self_strike_radius: args
            .self_strike
            .or(config.self_strike)
            .unwrap_or(defaults.self_strike_radius),
    };

    let mut timestamps = args.at.clone();
    if let Some(path) = &args.frames {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            timestamps.push(line.parse().with_context(|| format!("bad timestamp `{line}`"))?);
        }
    }
    if timestamps.is_empty() {
        bail!("no timestamps given (use --at or --frames)");
    }

    let trajectory = read_poses_csv(&args.poses).context("loading poses")?;
    let (cloud, _) = load_cloud_with_times(&args.cloud, &args.times)?;

    let clouds_dir = args.output_dir.join(DIR_CLOUDS);
    let times_dir = args.output_dir.join(DIR_TIMES);
    std::fs::create_dir_all(&clouds_dir)?;
    std::fs::create_dir_all(&times_dir)?;

    let mut submaps = Vec::new();
    for &t in &timestamps {
        let submap = extract_submap(&cloud, t, &trajectory, &spec)?;
        let stem = stem_for_timestamp(t);
        write_cloud_bin(
            clouds_dir.join(format!("{stem}.bin")),
            &submap.cloud.points,
            None,
            BinLayout::XyzIntensity,
        )?;
        write_times(times_dir.join(format!("{stem}.times")), &submap.cloud.times)?;
        submaps.push(PerSubmap {
            stem,
            points: submap.cloud.len(),
        });
    }

    report::emit(
        &Summary {
            command: "extract-submaps",
            spec,
            source_points: cloud.len(),
            submaps,
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

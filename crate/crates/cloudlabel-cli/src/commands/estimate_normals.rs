use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::io::read_poses_csv;
use cloudlabel_core::visibility::estimate_normals;

use crate::config::FileConfig;
use crate::report;
use crate::sequence::load_cloud_with_times;

#[derive(Debug, Parser)]
pub struct Args {
    /// Cloud (.bin, world frame).
    #[arg(long)]
    pub cloud: PathBuf,
    /// Per-point observation times sidecar (.times).
    #[arg(long)]
    pub times: PathBuf,
    /// Trajectory file (poses.csv) for observer-based orientation.
    #[arg(long)]
    pub poses: PathBuf,
    /// Neighbor count.
    #[arg(long)]
    pub k: Option<usize>,
    /// Output CSV: nx,ny,nz,valid,quality per point.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    points: usize,
    k: usize,
    valid: usize,
    invalid: usize,
}

pub fn run(args: Args, config: &FileConfig) -> anyhow::Result<bool> {
    let k = args.k.or(config.normal_k).unwrap_or(10);
    let trajectory = read_poses_csv(&args.poses).context("loading poses")?;
    let (cloud, _) = load_cloud_with_times(&args.cloud, &args.times)?;
    let field = estimate_normals(&cloud, k, &trajectory)?;

    let mut writer = csv::Writer::from_path(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    writer.write_record(["nx", "ny", "nz", "valid", "quality"])?;
    let mut valid = 0usize;
    for (normal, quality) in field.normals.iter().zip(&field.quality) {
        match normal {
            Some(n) => {
                valid += 1;
                writer.write_record([
                    n.x.to_string(),
                    n.y.to_string(),
                    n.z.to_string(),
                    "1".into(),
                    quality.to_string(),
                ])?;
            }
            None => {
                writer.write_record(["0", "0", "0", "0", &quality.to_string()])?;
            }
        }
    }
    writer.flush()?;

    report::emit(
        &Summary {
            command: "estimate-normals",
            points: cloud.len(),
            k,
            valid,
            invalid: cloud.len() - valid,
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

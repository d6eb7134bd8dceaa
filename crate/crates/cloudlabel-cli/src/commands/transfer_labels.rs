use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::io::{
    write_cloud_bin, write_histogram_csv, write_label_file, write_times, BinLayout, DIR_CLOUDS,
    DIR_HISTS, DIR_LABELS, DIR_TIMES,
};
use cloudlabel_core::ontology::ClassOntology;
use cloudlabel_core::pose::LookupMode;
use cloudlabel_core::transfer::{transfer_labels, TransferConfig, TransferReport};
use cloudlabel_core::visibility::GhprConfig;

use crate::config::FileConfig;
use crate::report;
use crate::sequence::{load_cloud_with_times, load_sequence, to_world_frame};

#[derive(Debug, Parser)]
pub struct Args {
    /// Sequence directory (poses.csv, camera_calibration.yaml, indexLabel/).
    #[arg(long)]
    pub sequence: PathBuf,
    /// Global cloud (.bin, world frame). Default mode transfers onto this.
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    /// Per-point observation times for --cloud (.times).
    #[arg(long)]
    pub times: Option<PathBuf>,
    /// Transfer onto each sequence submap (Clouds/ + Times/) instead of a
    /// global cloud.
    #[arg(long)]
    pub per_submap: bool,
    /// Reflection kernel exponent (negative).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Visibility range ceiling, meters.
    #[arg(long)]
    pub max_range: Option<f64>,
    /// Visibility range floor, meters.
    #[arg(long)]
    pub min_range: Option<f64>,
    /// Facing-check slack, degrees.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Neighbor count for normal estimation.
    #[arg(long)]
    pub k: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    mode: &'static str,
    config: TransferConfig,
    num_classes: usize,
    frames: usize,
    reports: Vec<NamedReport>,
}

#[derive(Serialize)]
struct NamedReport {
    name: String,
    #[serde(flatten)]
    report: TransferReport,
}

fn build_config(args: &Args, config: &FileConfig) -> anyhow::Result<TransferConfig> {
    let ghpr_defaults = GhprConfig::default();
    Ok(TransferConfig {
        ghpr: GhprConfig {
            gamma: args.gamma.or(config.gamma).unwrap_or(ghpr_defaults.gamma),
            max_range: args
                .max_range
                .or(config.max_range)
                .unwrap_or(ghpr_defaults.max_range),
            min_range: args
                .min_range
                .or(config.min_range)
                .unwrap_or(ghpr_defaults.min_range),
        },
        slack_deg: args.slack.or(config.slack_deg).unwrap_or(10.0),
        normal_k: args.k.or(config.normal_k).unwrap_or(10),
    })
}

pub fn run(args: Args, config: &FileConfig) -> anyhow::Result<bool> {
    let cfg = build_config(&args, config)?;
    if !cfg.ghpr.is_valid() {
        bail!("invalid visibility config: {:?}", cfg.ghpr);
    }
    let ontology = ClassOntology::benchmark();
    let seq = load_sequence(&args.sequence)?;
    let frames = seq.load_frames(&ontology)?;
    let num_classes = ontology.num_eval2d();

    std::fs::create_dir_all(&args.output_dir)?;
    let mut reports = Vec::new();
    let mode;

    if args.per_submap {
        mode = "per-submap";
        let stems = seq.layout.stems(DIR_CLOUDS).context("listing Clouds")?;
        if stems.is_empty() {
            bail!("no submaps in {}", seq.layout.dir(DIR_CLOUDS).display());
        }
        for dir in [DIR_CLOUDS, DIR_LABELS, DIR_HISTS, DIR_TIMES] {
            std::fs::create_dir_all(args.output_dir.join(dir))?;
        }
        for stem in &stems {
            let t: f64 = stem
                .parse()
                .with_context(|| format!("stem `{stem}` is not a timestamp"))?;
            let pose = seq
                .trajectory
                .pose_at(t, LookupMode::exact())
                .with_context(|| format!("no pose for submap `{stem}`"))?;
            let (sensor_cloud, _) = load_cloud_with_times(
                &seq.layout.cloud_path(stem),
                &seq.layout.times_path(stem),
            )?;
            let world = to_world_frame(&sensor_cloud, &pose)?;
            let out = transfer_labels(&world, &frames, &seq.trajectory, &cfg, num_classes)?;

            // Outputs mirror the sequence layout: the filtered cloud goes
            // back to the sensor frame so Clouds/Labels/Hists stay aligned.
            let back: Vec<nalgebra::Point3<f64>> = out
                .cloud
                .points
                .iter()
                .map(|p| pose.inverse_transform_point(p))
                .collect();
            write_cloud_bin(
                args.output_dir.join(DIR_CLOUDS).join(format!("{stem}.bin")),
                &back,
                None,
                BinLayout::XyzIntensity,
            )?;
            write_times(
                args.output_dir.join(DIR_TIMES).join(format!("{stem}.times")),
                &out.cloud.times,
            )?;
            write_label_file(
                args.output_dir.join(DIR_LABELS).join(format!("{stem}.label")),
                &out
                    .cloud
                    .modes
                    .as_ref()
                    .expect("transfer emits modes")
                    .iter()
                    .map(|&m| m as u32)
                    .collect::<Vec<_>>(),
            )?;
            write_histogram_csv(
                args.output_dir.join(DIR_HISTS).join(format!("{stem}.csv")),
                out.cloud.histograms.as_ref().expect("transfer emits histograms"),
                &ontology,
            )?;
            reports.push(NamedReport {
                name: stem.clone(),
                report: out.report,
            });
        }
    } else {
        mode = "global";
        let (cloud_path, times_path) = match (&args.cloud, &args.times) {
            (Some(c), Some(t)) => (c.clone(), t.clone()),
            _ => bail!("global mode needs --cloud and --times (or use --per-submap)"),
        };
        let (cloud, _) = load_cloud_with_times(&cloud_path, &times_path)?;
        let out = transfer_labels(&cloud, &frames, &seq.trajectory, &cfg, num_classes)?;
        write_cloud_bin(
            args.output_dir.join("cloud.bin"),
            &out.cloud.points,
            None,
            BinLayout::XyzIntensity,
        )?;
        write_times(args.output_dir.join("cloud.times"), &out.cloud.times)?;
        write_label_file(
            args.output_dir.join("labels.label"),
            &out
                .cloud
                .modes
                .as_ref()
                .expect("transfer emits modes")
                .iter()
                .map(|&m| m as u32)
                .collect::<Vec<_>>(),
        )?;
        write_histogram_csv(
            args.output_dir.join("hists.csv"),
            out.cloud.histograms.as_ref().expect("transfer emits histograms"),
            &ontology,
        )?;
        reports.push(NamedReport {
            name: "global".into(),
            report: out.report,
        });
    }

    report::emit(
        &Summary {
            command: "transfer-labels",
            mode,
            config: cfg,
            num_classes,
            frames: frames.len(),
            reports,
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

//! 2D and 3D segmentation evaluation over paired ground-truth/prediction
//! directories. Pairs share a filename stem; 2D inputs are index-label PNGs,
//! 3D inputs are `.label` files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::eval::{ConfusionMatrix, UndefinedPolicy};
use cloudlabel_core::io::{read_index_label_png, read_label_file};
use cloudlabel_core::ontology::{ClassOntology, IGNORE};

use crate::config::FileConfig;
use crate::report;

#[derive(Debug, Parser)]
pub struct Args2d {
    /// Ground-truth directory of index-label PNGs.
    #[arg(long)]
    pub gt: PathBuf,
    /// Prediction directory of index-label PNGs.
    #[arg(long)]
    pub pred: PathBuf,
    /// Count undefined-IoU classes as zero instead of skipping them.
    #[arg(long, value_enum, default_value_t = PolicyArg::CountAsZero)]
    pub undefined: PolicyArg,
    /// Per-class IoU table CSV.
    #[arg(long)]
    pub output_csv: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Parser)]
pub struct Args3d {
    /// Ground-truth directory of .label files.
    #[arg(long)]
    pub gt: PathBuf,
    /// Prediction directory of .label files.
    #[arg(long)]
    pub pred: PathBuf,
    /// Value convention inside the .label files.
    #[arg(long, value_enum, default_value_t = LabelSpace::Raw)]
    pub label_space: LabelSpace,
    #[arg(long, value_enum, default_value_t = PolicyArg::CountAsZero)]
    pub undefined: PolicyArg,
    #[arg(long)]
    pub output_csv: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum PolicyArg {
    CountAsZero,
    Skip,
}

impl From<PolicyArg> for UndefinedPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::CountAsZero => UndefinedPolicy::CountAsZero,
            PolicyArg::Skip => UndefinedPolicy::Skip,
        }
    }
}

/// Raw files carry the 18-class annotation indices and are merged at load
/// time; eval files already carry 2D evaluation indices (or the ignore
/// sentinel).
#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum LabelSpace {
    Raw,
    Eval,
}

#[derive(Serialize)]
struct ClassIou {
    class: String,
    iou: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    pairs: usize,
    evaluated_classes: usize,
    miou: Option<f64>,
    per_class: Vec<ClassIou>,
}

fn paired_stems(gt: &Path, pred: &Path, extension: &str) -> anyhow::Result<Vec<String>> {
    let list = |dir: &Path| -> anyhow::Result<Vec<String>> {
        let mut stems = Vec::new();
        for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == extension) {
                if let Some(stem) = path.file_stem() {
                    stems.push(stem.to_string_lossy().into_owned());
                }
            }
        }
        stems.sort();
        Ok(stems)
    };
    let gt_stems = list(gt)?;
    let pred_stems: std::collections::BTreeSet<String> = list(pred)?.into_iter().collect();
    let paired: Vec<String> = gt_stems
        .into_iter()
        .filter(|s| pred_stems.contains(s))
        .collect();
    if paired.is_empty() {
        bail!(
            "no paired files between {} and {}",
            gt.display(),
            pred.display()
        );
    }
    Ok(paired)
}

fn write_iou_csv(
    path: &Path,
    classes: &[String],
    ious: &[Option<f64>],
    subset: &[u8],
) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["class", "iou"])?;
    for &c in subset {
        let iou = ious[c as usize];
        writer.write_record([
            classes[c as usize].as_str(),
            &iou.map_or(String::from("undefined"), |v| v.to_string()),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    command: &'static str,
    pairs: usize,
    cm: &ConfusionMatrix,
    ontology: &ClassOntology,
    subset: &[u8],
    policy: UndefinedPolicy,
    output_csv: Option<&Path>,
    report_path: Option<&Path>,
) -> anyhow::Result<()> {
    let ious = cm.iou_per_class();
    let miou = cm.miou(subset, policy);
    if let Some(path) = output_csv {
        write_iou_csv(path, ontology.eval2d(), &ious, subset)?;
    }
    report::emit(
        &Summary {
            command,
            pairs,
            evaluated_classes: subset.len(),
            miou,
            per_class: subset
                .iter()
                .map(|&c| ClassIou {
                    class: ontology.eval2d()[c as usize].clone(),
                    iou: ious[c as usize],
                })
                .collect(),
        },
        report_path,
    )?;
    Ok(())
}

pub fn run_2d(args: Args2d, _config: &FileConfig) -> anyhow::Result<bool> {
    let ontology = ClassOntology::benchmark();
    let stems = paired_stems(&args.gt, &args.pred, "png")?;
    let mut cm = ConfusionMatrix::new(ontology.num_eval2d());
    for stem in &stems {
        let gt = read_index_label_png(args.gt.join(format!("{stem}.png")), &ontology)?;
        let pred = read_index_label_png(args.pred.join(format!("{stem}.png")), &ontology)?;
        if gt.width() != pred.width() || gt.height() != pred.height() {
            bail!("{stem}: raster dimensions differ");
        }
        cm.accumulate(gt.data(), pred.data())?;
    }
    // All 15 evaluation classes.
    let subset: Vec<u8> = (0..ontology.num_eval2d() as u8).collect();
    summarize(
        "eval-2d",
        stems.len(),
        &cm,
        &ontology,
        &subset,
        args.undefined.into(),
        args.output_csv.as_deref(),
        args.report.as_deref(),
    )?;
    Ok(true)
}

pub fn run_3d(args: Args3d, _config: &FileConfig) -> anyhow::Result<bool> {
    let ontology = ClassOntology::benchmark();
    let stems = paired_stems(&args.gt, &args.pred, "label")?;
    let mut cm = ConfusionMatrix::new(ontology.num_eval2d());
    for stem in &stems {
        let gt = load_labels(
            &args.gt.join(format!("{stem}.label")),
            args.label_space,
            &ontology,
        )?;
        let pred = load_labels(
            &args.pred.join(format!("{stem}.label")),
            args.label_space,
            &ontology,
        )?;
        if gt.len() != pred.len() {
            bail!("{stem}: point counts differ ({} vs {})", gt.len(), pred.len());
        }
        // Predictions for points whose ground truth is outside the evaluated
        // space are skipped by the ignore rule.
        let pred_sanitized: Vec<u8> = gt
            .iter()
            .zip(&pred)
            .map(|(&g, &p)| if g == IGNORE { 0 } else { p })
            .collect();
        cm.accumulate(&gt, &pred_sanitized)?;
    }
    // The 12-class 3D evaluation subset.
    let subset = ontology.eval3d_subset();
    summarize(
        "eval-3d",
        stems.len(),
        &cm,
        &ontology,
        &subset,
        args.undefined.into(),
        args.output_csv.as_deref(),
        args.report.as_deref(),
    )?;
    Ok(true)
}

/// Reads a `.label` file into 2D-evaluation indices. Raw-space values are
/// merged through the ontology (excluded classes become ignore); eval-space
/// values are validated as-is. Predictions mapped to ignore while ground
/// truth is valid would be an error, so eval-3d sanitizes against gt first.
fn load_labels(
    path: &Path,
    space: LabelSpace,
    ontology: &ClassOntology,
) -> anyhow::Result<Vec<u8>> {
    let raw = read_label_file(path)?;
    match space {
        LabelSpace::Raw => raw
            .iter()
            .map(|&v| {
                if !ontology.is_valid_raw(v) {
                    bail!("{}: unknown raw class index {v}", path.display());
                }
                Ok(ontology.merge_raw(v).unwrap_or(IGNORE))
            })
            .collect(),
        LabelSpace::Eval => raw
            .iter()
            .map(|&v| {
                let v8 = u8::try_from(v).unwrap_or(u8::MAX);
                if !ontology.is_valid_eval2d_or_ignore(v8) {
                    bail!("{}: unknown eval class index {v}", path.display());
                }
                Ok(v8)
            })
            .collect(),
    }
}

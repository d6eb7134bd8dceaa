use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::cloud::LabelHistograms;
use cloudlabel_core::eval::{cooccurrence, CooccurrenceMatrix, CooccurrenceWeighting};
use cloudlabel_core::io::{read_histogram_csv, read_label_file};
use cloudlabel_core::ontology::ClassOntology;

use crate::config::FileConfig;
use crate::report;

#[derive(Debug, Parser)]
pub struct Args {
    /// Histogram CSV (or a directory of them).
    #[arg(long)]
    pub hists: PathBuf,
    /// Mode-label .label file (or a directory pairing the histograms by stem).
    #[arg(long)]
    pub labels: PathBuf,
    /// How much one point contributes to its mode's row.
    #[arg(long, value_enum, default_value_t = WeightingArg::PerPoint)]
    pub weighting: WeightingArg,
    /// Co-occurrence matrix CSV output.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum WeightingArg {
    PerPoint,
    MassWeighted,
}

impl From<WeightingArg> for CooccurrenceWeighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::PerPoint => CooccurrenceWeighting::PerPoint,
            WeightingArg::MassWeighted => CooccurrenceWeighting::MassWeighted,
        }
    }
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    points: usize,
    diagonal_mean: f64,
    rows_with_support: usize,
    output: PathBuf,
}

/// Histogram/mode pairs: either two files or two directories paired by stem.
fn collect_pairs(hists: &Path, labels: &Path) -> anyhow::Result<Vec<(PathBuf, PathBuf)>> {
    if hists.is_file() {
        return Ok(vec![(hists.to_path_buf(), labels.to_path_buf())]);
    }
    let mut pairs = Vec::new();
    let mut stems: Vec<String> = std::fs::read_dir(hists)
        .with_context(|| format!("listing {}", hists.display()))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
        .filter_map(|e| e.path().file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    stems.sort();
    for stem in stems {
        let label_path = labels.join(format!("{stem}.label"));
        if !label_path.is_file() {
            bail!("no label file for histogram stem `{stem}`");
        }
        pairs.push((hists.join(format!("{stem}.csv")), label_path));
    }
    if pairs.is_empty() {
        bail!("no histogram files in {}", hists.display());
    }
    Ok(pairs)
}

pub fn run(args: Args, _config: &FileConfig) -> anyhow::Result<bool> {
    let ontology = ClassOntology::benchmark();
    let pairs = collect_pairs(&args.hists, &args.labels)?;

    // Aggregate all pairs into one histogram array with matching modes.
    let mut all_rows: Vec<Vec<u32>> = Vec::new();
    let mut all_modes: Vec<u8> = Vec::new();
    let mut num_classes = None;
    for (hist_path, label_path) in &pairs {
        let h = read_histogram_csv(hist_path)?;
        let labels = read_label_file(label_path)?;
        if labels.len() != h.num_points() {
            bail!(
                "{}: {} modes for {} histogram rows",
                label_path.display(),
                labels.len(),
                h.num_points()
            );
        }
        let c = *num_classes.get_or_insert(h.num_classes());
        if h.num_classes() != c {
            bail!("{}: inconsistent class count", hist_path.display());
        }
        for (i, &label) in labels.iter().enumerate() {
            all_rows.push(h.row(i).to_vec());
            all_modes.push(u8::try_from(label).unwrap_or(u8::MAX));
        }
    }
    let num_classes = num_classes.unwrap_or(ontology.num_eval2d());
    let histograms = LabelHistograms::from_rows(all_rows, num_classes)?;
    let matrix = cooccurrence(&histograms, &all_modes, args.weighting.into())?;

    write_matrix_csv(&args.output, &matrix, &ontology)?;
    let rows_with_support = (0..num_classes)
        .filter(|&c| matrix.support(c as u8) > 0)
        .count();
    report::emit(
        &Summary {
            command: "cooccurrence",
            points: histograms.num_points(),
            diagonal_mean: matrix.diagonal_mean(),
            rows_with_support,
            output: args.output.clone(),
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

fn write_matrix_csv(
    path: &Path,
    matrix: &CooccurrenceMatrix,
    ontology: &ClassOntology,
) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["class".to_string(), "support".to_string()];
    header.extend(ontology.eval2d().iter().cloned());
    writer.write_record(&header)?;
    for c in 0..matrix.num_classes() {
        let mut row = vec![
            ontology.eval2d()[c].clone(),
            matrix.support(c as u8).to_string(),
        ];
        row.extend(matrix.row(c as u8).iter().map(|v| v.to_string()));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

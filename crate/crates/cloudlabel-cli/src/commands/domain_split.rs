use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use serde::{Deserialize, Serialize};

use cloudlabel_core::io::read_samples_csv;
use cloudlabel_core::split::{domain_subsplit, DomainFilter, SetKind, TagKind};

use crate::config::FileConfig;
use crate::report;

#[derive(Debug, Parser)]
pub struct Args {
    /// split.json produced by gen-split.
    #[arg(long)]
    pub split: PathBuf,
    /// The samples CSV the split was generated from.
    #[arg(long)]
    pub samples: PathBuf,
    /// Tag kind to filter on.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Train-side tag value (e.g. winter, Venman).
    #[arg(long)]
    pub train_tag: String,
    /// Test-side tag value.
    #[arg(long)]
    pub test_tag: String,
    /// Classes below this count on either side are flagged for exclusion.
    #[arg(long, default_value_t = 1)]
    pub min_class_count: u64,
    /// Output JSON path.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum KindArg {
    Season,
    Environment,
}

#[derive(Deserialize)]
struct SplitFilePart {
    memberships: Vec<MembershipPart>,
}

#[derive(Deserialize)]
struct MembershipPart {
    id: String,
    set: SetKind,
}

#[derive(Serialize)]
struct SubSplitFile {
    filter: DomainFilter,
    min_class_count: u64,
    train_ids: Vec<String>,
    test_ids: Vec<String>,
    excluded_classes: Vec<usize>,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    filter: DomainFilter,
    train: usize,
    test: usize,
    excluded_classes: Vec<usize>,
    output: PathBuf,
}

pub fn run(args: Args, _config: &FileConfig) -> anyhow::Result<bool> {
    let (samples, _) = read_samples_csv(&args.samples).context("loading samples")?;
    let split_text = std::fs::read_to_string(&args.split)
        .with_context(|| format!("reading {}", args.split.display()))?;
    let split: SplitFilePart = serde_json::from_str(&split_text).context("parsing split.json")?;

    // Memberships are keyed by id; realign them to the sample order.
    let mut by_id: std::collections::HashMap<&str, SetKind> = std::collections::HashMap::new();
    for m in &split.memberships {
        by_id.insert(m.id.as_str(), m.set);
    }
    let sets: Vec<SetKind> = samples
        .iter()
        .map(|s| {
            by_id
                .get(s.id.as_str())
                .copied()
                .with_context(|| format!("sample `{}` missing from split", s.id))
        })
        .collect::<anyhow::Result<_>>()?;

    let filter = DomainFilter {
        kind: match args.kind {
            KindArg::Season => TagKind::Season,
            KindArg::Environment => TagKind::Environment,
        },
        train_tag: args.train_tag.clone(),
        test_tag: args.test_tag.clone(),
    };
    let sub = domain_subsplit(&sets, &samples, &filter, args.min_class_count)?;

    let file = SubSplitFile {
        filter: filter.clone(),
        min_class_count: args.min_class_count,
        train_ids: sub.train.iter().map(|&i| samples[i as usize].id.clone()).collect(),
        test_ids: sub.test.iter().map(|&i| samples[i as usize].id.clone()).collect(),
        excluded_classes: sub.excluded_classes.clone(),
    };
    if let Some(parent) = args.output.parent() {
        std::fs::create_dir_all(parent).ok();
    }
    std::fs::write(&args.output, serde_json::to_string_pretty(&file)?)?;

    report::emit(
        &Summary {
            command: "domain-split",
            filter,
            train: sub.train.len(),
            test: sub.test.len(),
            excluded_classes: sub.excluded_classes,
            output: args.output.clone(),
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

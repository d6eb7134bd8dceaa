use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use serde::Serialize;

use cloudlabel_core::io::read_samples_csv;
use cloudlabel_core::split::{optimize_split, MetricWeights, SetKind, SplitAssignment, SplitConfig};

use crate::config::FileConfig;
use crate::report;

#[derive(Debug, Parser)]
pub struct Args {
    /// Samples CSV (id,x,y,sequence,season,environment,<class counts...>).
    #[arg(long)]
    pub samples: PathBuf,
    /// Number of accepted candidate splits to score.
    #[arg(long)]
    pub candidates: Option<usize>,
    /// Number of k-means chunks.
    #[arg(long)]
    pub k: Option<usize>,
    /// RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train/val/test ratios as `train,val,test`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub ratios: Option<Vec<f64>>,
    /// Buffer distance between sets, meters.
    #[arg(long)]
    pub buffer: Option<f64>,
    #[arg(long)]
    pub w_ld: Option<f64>,
    #[arg(long)]
    pub w_if: Option<f64>,
    #[arg(long)]
    pub w_kl: Option<f64>,
    #[arg(long)]
    pub w_sc: Option<f64>,
    /// Output directory for split.json and the set list files.
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Membership {
    id: String,
    set: SetKind,
}

#[derive(Serialize)]
struct SplitFile {
    config: SplitConfig,
    assignment: SplitAssignment,
    set_sizes: SetSizes,
    achieved_ratios: AchievedRatios,
    candidates_generated: usize,
    candidates_accepted: usize,
    memberships: Vec<Membership>,
}

#[derive(Serialize)]
struct SetSizes {
    train: usize,
    val: usize,
    test: usize,
    buffer: usize,
}

#[derive(Serialize)]
struct AchievedRatios {
    train: f64,
    val: f64,
    test: f64,
}

#[derive(Serialize)]
struct Summary {
    command: &'static str,
    samples: usize,
    config: SplitConfig,
    scores: cloudlabel_core::split::MetricScores,
    weighted_score: f64,
    set_sizes: SetSizes,
    achieved_ratios: AchievedRatios,
    candidates_generated: usize,
    candidates_accepted: usize,
    split_path: PathBuf,
}

pub fn run(args: Args, config: &FileConfig) -> anyhow::Result<bool> {
    let defaults = SplitConfig::default();
    let ratios = match args.ratios.as_deref().or(config
        .ratios
        .as_ref()
        .map(|r| r.as_slice()))
    {
        Some([a, b, c]) => [*a, *b, *c],
        Some(_) => anyhow::bail!("--ratios needs exactly three values"),
        None => defaults.ratios,
    };
    let cfg = SplitConfig {
        ratios,
        buffer_dist: args
            .buffer
            .or(config.buffer_dist)
            .unwrap_or(defaults.buffer_dist),
        k: args.k.or(config.k).unwrap_or(defaults.k),
        num_candidates: args
            .candidates
            .or(config.candidates)
            .unwrap_or(defaults.num_candidates),
        weights: MetricWeights {
            label_distribution: args.w_ld.or(config.w_ld).unwrap_or(1.0),
            inverse_frequency: args.w_if.or(config.w_if).unwrap_or(1.0),
            kl_divergence: args.w_kl.or(config.w_kl).unwrap_or(1.0),
            silhouette: args.w_sc.or(config.w_sc).unwrap_or(2.0),
        },
        seed: args.seed.or(config.seed).unwrap_or(defaults.seed),
    };

    let (samples, _class_names) = read_samples_csv(&args.samples).context("loading samples")?;
    let outcome = optimize_split(&samples, &cfg)?;

    std::fs::create_dir_all(&args.output_dir)?;
    let sets = &outcome.assignment.sets;
    let count = |kind: SetKind| sets.iter().filter(|&&s| s == kind).count();
    let set_sizes = SetSizes {
        train: count(SetKind::Train),
        val: count(SetKind::Val),
        test: count(SetKind::Test),
        buffer: count(SetKind::Buffer),
    };
    let non_buffer = (set_sizes.train + set_sizes.val + set_sizes.test).max(1) as f64;
    let achieved_ratios = AchievedRatios {
        train: set_sizes.train as f64 / non_buffer,
        val: set_sizes.val as f64 / non_buffer,
        test: set_sizes.test as f64 / non_buffer,
    };

    // Plain-text id lists, one per set, usable as training-tool file lists.
    for (kind, name) in [
        (SetKind::Train, "train.txt"),
        (SetKind::Val, "val.txt"),
        (SetKind::Test, "test.txt"),
        (SetKind::Buffer, "buffer.txt"),
    ] {
        let text: String = samples
            .iter()
            .zip(sets)
            .filter(|(_, &s)| s == kind)
            .map(|(sample, _)| format!("{}\n", sample.id))
            .collect();
        std::fs::write(args.output_dir.join(name), text)?;
    }

    let split_path = args.output_dir.join("split.json");
    let split_file = SplitFile {
        config: cfg.clone(),
        assignment: outcome.assignment.clone(),
        set_sizes,
        achieved_ratios,
        candidates_generated: outcome.candidates_generated,
        candidates_accepted: outcome.candidates_accepted,
        memberships: samples
            .iter()
            .zip(sets)
            .map(|(sample, &set)| Membership {
                id: sample.id.clone(),
                set,
            })
            .collect(),
    };
    std::fs::write(&split_path, serde_json::to_string_pretty(&split_file)?)?;

    let set_sizes = SetSizes {
        train: count(SetKind::Train),
        val: count(SetKind::Val),
        test: count(SetKind::Test),
        buffer: count(SetKind::Buffer),
    };
    let achieved_ratios = AchievedRatios {
        train: set_sizes.train as f64 / non_buffer,
        val: set_sizes.val as f64 / non_buffer,
        test: set_sizes.test as f64 / non_buffer,
    };
    report::emit(
        &Summary {
            command: "gen-split",
            samples: samples.len(),
            config: cfg,
            scores: outcome.assignment.scores,
            weighted_score: outcome.assignment.weighted_score,
            set_sizes,
            achieved_ratios,
            candidates_generated: outcome.candidates_generated,
            candidates_accepted: outcome.candidates_accepted,
            split_path,
        },
        args.report.as_deref(),
    )?;
    Ok(true)
}

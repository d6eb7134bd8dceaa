//! Metric-optimized train/val/test split generation with spatial buffers.
//!
//! Samples are grouped into spatial chunks by k-means on their planar
//! coordinates; many candidate splits are generated by randomly assigning
//! chunks to sets, buffered so no two samples of different sets are closer
//! than the buffer distance, filtered for full class coverage, and scored by
//! class-distribution divergence metrics plus a geographic silhouette. The
//! candidate with the minimum combined score wins.

mod candidate;
mod domain;
mod kmeans;
mod metrics;

pub use candidate::{generate_candidate, NeighborLists};
pub use domain::{domain_subsplit, DomainFilter, SubSplit, TagKind};
pub use kmeans::kmeans_chunks;
pub use metrics::{
    metric_kl, metric_label_distribution, metric_inverse_frequency, metric_silhouette,
    PairwiseDistances,
};

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("{have} samples is fewer than {need}")]
    TooFewSamples { have: usize, need: usize },
    #[error("set {0:?} is empty")]
    EmptySet(SetKind),
    #[error("set {0:?} has fewer than 2 samples")]
    SingletonSet(SetKind),
    #[error("no candidate satisfied the class-coverage constraint")]
    NoValidCandidates,
    #[error("no samples left after domain filtering")]
    EmptyAfterFilter,
    #[error("invalid split configuration: {0}")]
    InvalidConfig(String),
}

/// Membership of one sample in a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Train,
    Val,
    Test,
    Buffer,
}

impl SetKind {
    pub const NON_BUFFER: [SetKind; 3] = [SetKind::Train, SetKind::Val, SetKind::Test];
}

/// One split-generation input sample: planar position, per-class counts, and
/// the tags used by domain sub-splits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub xy: [f64; 2],
    pub class_counts: Vec<u64>,
    pub sequence: String,
    pub season: String,
    pub environment: String,
}

/// Weights of the combined candidate score.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricWeights {
    pub label_distribution: f64,
    pub inverse_frequency: f64,
    pub kl_divergence: f64,
    pub silhouette: f64,
}

impl Default for MetricWeights {
    fn default() -> Self {
        Self {
            label_distribution: 1.0,
            inverse_frequency: 1.0,
            kl_divergence: 1.0,
            silhouette: 2.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitConfig {
    /// Train/val/test target fractions; must sum to 1.
    pub ratios: [f64; 3],
    /// Minimum distance between samples of different non-buffer sets, meters.
    pub buffer_dist: f64,
    /// Number of k-means chunks.
    pub k: usize,
    /// Number of accepted candidates to score.
    pub num_candidates: usize,
    pub weights: MetricWeights,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            ratios: [0.70, 0.05, 0.25],
            buffer_dist: 45.0,
            k: 50,
            num_candidates: 1000,
            weights: MetricWeights::default(),
            seed: 0,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<(), SplitError> {
        let sum: f64 = self.ratios.iter().sum();
        if (sum - 1.0).abs() > 1.0e-9 || self.ratios.iter().any(|&r| r < 0.0) {
            return Err(SplitError::InvalidConfig(format!(
                "ratios {:?} must be non-negative and sum to 1",
                self.ratios
            )));
        }
        if self.k < 3 {
            return Err(SplitError::InvalidConfig("k must be at least 3".into()));
        }
        if self.num_candidates < 1 {
            return Err(SplitError::InvalidConfig(
                "num_candidates must be at least 1".into(),
            ));
        }
        if self.buffer_dist < 0.0 {
            return Err(SplitError::InvalidConfig(
                "buffer_dist must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Raw metric values of one candidate split.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricScores {
    pub label_distribution: f64,
    pub inverse_frequency: f64,
    pub kl_divergence: f64,
    pub silhouette: f64,
}

/// The selected split: per-sample memberships plus the metrics that justify
/// the selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub sets: Vec<SetKind>,
    pub scores: MetricScores,
    pub weighted_score: f64,
    pub seed: u64,
    pub k: usize,
    pub num_candidates: usize,
}

/// Result of the full optimization run.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub assignment: SplitAssignment,
    /// Attempts made (accepted + rejected).
    pub candidates_generated: usize,
    pub candidates_accepted: usize,
    /// Index of the winner within the accepted candidates.
    pub winner_index: usize,
    /// Combined score of every accepted candidate.
    pub all_scores: Vec<f64>,
}

/// Upper bound on generation attempts, as a multiple of `num_candidates`.
const MAX_ATTEMPT_FACTOR: usize = 50;

/// Per-candidate RNG streams are derived from (seed, attempt index) so that
/// generation is deterministic and order-independent under parallelism.
fn stream_seed(seed: u64, attempt: usize) -> u64 {
    let mut x = seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generates, filters, scores, and selects the best split.
pub fn optimize_split(
    samples: &[SampleRecord],
    cfg: &SplitConfig,
) -> Result<SplitOutcome, SplitError> {
    cfg.validate()?;
    let chunks = kmeans_chunks(samples, cfg.k, cfg.seed)?;
    let neighbors = NeighborLists::build(samples, cfg.buffer_dist);
    let distances = PairwiseDistances::build(samples);

    let max_attempts = cfg.num_candidates.saturating_mul(MAX_ATTEMPT_FACTOR);
    let mut accepted: Vec<(Vec<SetKind>, MetricScores)> = Vec::new();
    let mut next_attempt = 0usize;
    while accepted.len() < cfg.num_candidates && next_attempt < max_attempts {
        let want = cfg.num_candidates - accepted.len();
        let batch_end = next_attempt.saturating_add(want.max(16)).min(max_attempts);
        let batch: Vec<Option<(Vec<SetKind>, MetricScores)>> = (next_attempt..batch_end)
            .into_par_iter()
            .map(|attempt| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, attempt));
                let sets = generate_candidate(samples, &chunks, cfg, &neighbors, &mut rng)?;
                let scores = score_candidate(&sets, samples, &distances).ok()?;
                Some((sets, scores))
            })
            .collect();
        for item in batch.into_iter().flatten() {
            if accepted.len() < cfg.num_candidates {
                accepted.push(item);
            }
        }
        next_attempt = batch_end;
    }
    if accepted.is_empty() {
        return Err(SplitError::NoValidCandidates);
    }

    let metric_list: Vec<MetricScores> = accepted.iter().map(|(_, m)| *m).collect();
    let (all_scores, winner_index) = combine_scores(&metric_list, &cfg.weights);
    let (sets, scores) = accepted.swap_remove(winner_index);
    Ok(SplitOutcome {
        assignment: SplitAssignment {
            sets,
            scores,
            weighted_score: all_scores[winner_index],
            seed: cfg.seed,
            k: cfg.k,
            num_candidates: cfg.num_candidates,
        },
        candidates_generated: next_attempt,
        candidates_accepted: metric_list.len(),
        winner_index,
        all_scores,
    })
}

/// All four metrics of one candidate.
pub fn score_candidate(
    sets: &[SetKind],
    samples: &[SampleRecord],
    distances: &PairwiseDistances,
) -> Result<MetricScores, SplitError> {
    Ok(MetricScores {
        label_distribution: metric_label_distribution(sets, samples)?,
        inverse_frequency: metric_inverse_frequency(sets, samples)?,
        kl_divergence: metric_kl(sets, samples)?,
        silhouette: metric_silhouette(sets, samples, distances)?,
    })
}

/// Z-normalizes each metric across candidates and combines them with the
/// configured weights (silhouette subtracted: higher is better). Returns the
/// combined score per candidate and the argmin index, ties broken toward the
/// lowest candidate index.
pub fn combine_scores(metrics: &[MetricScores], weights: &MetricWeights) -> (Vec<f64>, usize) {
    let n = metrics.len();
    let column = |f: fn(&MetricScores) -> f64| -> Vec<f64> { metrics.iter().map(f).collect() };
    let z = |values: &[f64]| -> Vec<f64> {
        let mean: f64 = values.iter().sum::<f64>() / n as f64;
        let var: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        if sd <= 1.0e-12 {
            vec![0.0; n]
        } else {
            values.iter().map(|v| (v - mean) / sd).collect()
        }
    };
    let z_ld = z(&column(|m| m.label_distribution));
    let z_if = z(&column(|m| m.inverse_frequency));
    let z_kl = z(&column(|m| m.kl_divergence));
    let z_sc = z(&column(|m| m.silhouette));

    let scores: Vec<f64> = (0..n)
        .map(|i| {
            weights.label_distribution * z_ld[i] + weights.inverse_frequency * z_if[i]
                + weights.kl_divergence * z_kl[i]
                - weights.silhouette * z_sc[i]
        })
        .collect();
    let mut winner = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[winner] {
            winner = i;
        }
    }
    (scores, winner)
}

//! Label co-occurrence analysis over per-point histograms.
//!
//! Row `a` of the matrix is the mean fractional histogram composition of
//! points whose mode label is `a`; the diagonal is therefore the mean label
//! purity of that class (1 = every observation of every such point agreed).

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::cloud::LabelHistograms;

/// Row-stochastic co-occurrence matrix with per-row support counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    num_classes: usize,
    rows: Vec<f64>,
    support: Vec<u64>,
}

/// How much one point contributes to its mode's row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CooccurrenceWeighting {
    /// Each point contributes its normalized histogram (every point counts
    /// equally, regardless of how many observations it received).
    PerPoint,
    /// Each point contributes raw counts (points with more observations
    /// weigh more).
    MassWeighted,
}

impl CooccurrenceMatrix {
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn get(&self, row: u8, col: u8) -> f64 {
        self.rows[row as usize * self.num_classes + col as usize]
    }

    pub fn row(&self, row: u8) -> &[f64] {
        &self.rows[row as usize * self.num_classes..(row as usize + 1) * self.num_classes]
    }

    pub fn support(&self, row: u8) -> u64 {
        self.support[row as usize]
    }

    /// Mean of the diagonal over rows with support.
    pub fn diagonal_mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for c in 0..self.num_classes {
            if self.support[c] > 0 {
                sum += self.rows[c * self.num_classes + c];
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// Aggregates per-point histogram compositions into the co-occurrence matrix
/// keyed by each point's mode label. Every row with support is normalized to
/// sum to one.
pub fn cooccurrence(
    histograms: &LabelHistograms,
    modes: &[u8],
    weighting: CooccurrenceWeighting,
) -> Result<CooccurrenceMatrix, EvalError> {
    let c = histograms.num_classes();
    if modes.len() != histograms.num_points() {
        return Err(EvalError::LengthMismatch {
            gt: histograms.num_points(),
            pred: modes.len(),
        });
    }
    let mut rows = vec![0.0f64; c * c];
    let mut support = vec![0u64; c];
    for (i, &mode) in modes.iter().enumerate() {
        let row = histograms.row(i);
        let total: u64 = row.iter().map(|&v| v as u64).sum();
        if total == 0 {
            return Err(EvalError::ZeroHistogram { index: i });
        }
        if histograms.mode_of(i) != Some(mode) {
            return Err(EvalError::InconsistentMode { index: i });
        }
        let dst = &mut rows[mode as usize * c..(mode as usize + 1) * c];
        match weighting {
            CooccurrenceWeighting::PerPoint => {
                for (d, &v) in dst.iter_mut().zip(row) {
                    *d += v as f64 / total as f64;
                }
            }
            CooccurrenceWeighting::MassWeighted => {
                for (d, &v) in dst.iter_mut().zip(row) {
                    *d += v as f64;
                }
            }
        }
        support[mode as usize] += 1;
    }
    for a in 0..c {
        let row = &mut rows[a * c..(a + 1) * c];
        let sum: f64 = row.iter().sum();
        if sum > 0.0 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
    }
    Ok(CooccurrenceMatrix {
        num_classes: c,
        rows,
        support,
    })
}

//! Segmentation evaluation: confusion matrices with per-class IoU and mIoU,
//! and label-ambiguity analysis via the co-occurrence matrix.
//!
//! Accumulators are mergeable, so shards computed in parallel combine
//! associatively.

mod confusion;
mod cooccurrence;

pub use confusion::{ConfusionMatrix, UndefinedPolicy};
pub use cooccurrence::{cooccurrence, CooccurrenceMatrix, CooccurrenceWeighting};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {gt} ground-truth vs {pred} predicted values")]
    LengthMismatch { gt: usize, pred: usize },
    #[error("value {value} at index {index} is not a class index")]
    InvalidLabel { index: usize, value: u8 },
    #[error("point {index} has an all-zero histogram")]
    ZeroHistogram { index: usize },
    #[error("point {index}: mode is not the histogram argmax")]
    InconsistentMode { index: usize },
}

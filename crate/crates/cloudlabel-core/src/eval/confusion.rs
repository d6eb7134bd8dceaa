//! Confusion-matrix accumulation and intersection-over-union metrics.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::ontology::IGNORE;

/// C x C confusion counts; rows are ground truth, columns predictions.
/// Accumulation is additive and order-independent, so shards can be merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    num_classes: usize,
    counts: Vec<u64>,
}

/// How [`miou`](ConfusionMatrix::miou) treats classes whose IoU denominator
/// is zero (never observed and never predicted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedPolicy {
    /// Count as 0, dragging down the mean (matches reports where unlearned
    /// classes score 0).
    CountAsZero,
    /// Exclude from the mean.
    Skip,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        Self {
            num_classes,
            counts: vec![0; num_classes * num_classes],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn get(&self, gt: u8, pred: u8) -> u64 {
        self.counts[gt as usize * self.num_classes + pred as usize]
    }

    /// Adds one array pair. Ignore-sentinel ground truth is skipped entirely;
    /// a valid ground truth paired with an ignore or out-of-range prediction
    /// is an error.
    pub fn accumulate(&mut self, gt: &[u8], pred: &[u8]) -> Result<(), EvalError> {
        if gt.len() != pred.len() {
            return Err(EvalError::LengthMismatch {
                gt: gt.len(),
                pred: pred.len(),
            });
        }
        for (i, (&g, &p)) in gt.iter().zip(pred).enumerate() {
            if g == IGNORE {
                continue;
            }
            if g as usize >= self.num_classes {
                return Err(EvalError::InvalidLabel {
                    index: i,
                    value: g,
                });
            }
            if p as usize >= self.num_classes {
                return Err(EvalError::InvalidLabel {
                    index: i,
                    value: p,
                });
            }
            self.counts[g as usize * self.num_classes + p as usize] += 1;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<(), EvalError> {
        if self.num_classes != other.num_classes {
            return Err(EvalError::LengthMismatch {
                gt: self.num_classes,
                pred: other.num_classes,
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Per-class IoU = TP / (TP + FP + FN); `None` when the denominator is
    /// zero.
    pub fn iou_per_class(&self) -> Vec<Option<f64>> {
        let n = self.num_classes;
        (0..n)
            .map(|c| {
                let tp = self.counts[c * n + c];
                let row: u64 = (0..n).map(|j| self.counts[c * n + j]).sum();
                let col: u64 = (0..n).map(|i| self.counts[i * n + c]).sum();
                let denom = row + col - tp;
                if denom == 0 {
                    None
                } else {
                    Some(tp as f64 / denom as f64)
                }
            })
            .collect()
    }

    /// Mean IoU over the given class subset, with the configured policy for
    /// undefined classes. `None` if no class contributes to the mean.
    pub fn miou(&self, subset: &[u8], policy: UndefinedPolicy) -> Option<f64> {
        let per_class = self.iou_per_class();
        let mut sum = 0.0;
        let mut count = 0usize;
        for &c in subset {
            match (per_class.get(c as usize).copied().flatten(), policy) {
                (Some(iou), _) => {
                    sum += iou;
                    count += 1;
                }
                (None, UndefinedPolicy::CountAsZero) => {
                    count += 1;
                }
                (None, UndefinedPolicy::Skip) => {}
            }
        }
        if count == 0 {
            None
        } else {
            Some(sum / count as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction_scores_one() {
        let mut cm = ConfusionMatrix::new(4);
        let gt = vec![0, 1, 2, 3, 2, 1];
        cm.accumulate(&gt, &gt).unwrap();
        let ious = cm.iou_per_class();
        assert!(ious.iter().all(|iou| *iou == Some(1.0)));
        assert_eq!(cm.miou(&[0, 1, 2, 3], UndefinedPolicy::CountAsZero), Some(1.0));
    }

    #[test]
    fn hand_computed_two_class_case() {
        // [[3, 1], [1, 3]]: IoU_0 = 3 / (3 + 1 + 1) = 0.6, same for class 1.
        let mut cm = ConfusionMatrix::new(2);
        cm.accumulate(&[0, 0, 0, 0, 1, 1, 1, 1], &[0, 0, 0, 1, 1, 1, 1, 0])
            .unwrap();
        assert_eq!(cm.get(0, 0), 3);
        assert_eq!(cm.get(0, 1), 1);
        assert_eq!(cm.get(1, 0), 1);
        assert_eq!(cm.get(1, 1), 3);
        let ious = cm.iou_per_class();
        assert!((ious[0].unwrap() - 0.6).abs() < 1e-12);
        assert!((ious[1].unwrap() - 0.6).abs() < 1e-12);
        assert!((cm.miou(&[0, 1], UndefinedPolicy::CountAsZero).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn ignore_ground_truth_is_skipped() {
        let mut cm = ConfusionMatrix::new(3);
        cm.accumulate(&[IGNORE, IGNORE], &[0, 1]).unwrap();
        assert_eq!(cm.total(), 0);
    }

    #[test]
    fn invalid_prediction_is_an_error() {
        let mut cm = ConfusionMatrix::new(3);
        assert!(matches!(
            cm.accumulate(&[0], &[IGNORE]),
            Err(EvalError::InvalidLabel { .. })
        ));
        assert!(matches!(
            cm.accumulate(&[0, 1], &[0]),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn undefined_policy_contract() {
        // Class 2 never occurs in gt or pred: undefined.
        let mut cm = ConfusionMatrix::new(3);
        cm.accumulate(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        let ious = cm.iou_per_class();
        assert!(ious[2].is_none());
        // IoU_0 = 1/2, IoU_1 = 2/3.
        let with_zero = cm.miou(&[0, 1, 2], UndefinedPolicy::CountAsZero).unwrap();
        assert!((with_zero - (0.5 + 2.0 / 3.0) / 3.0).abs() < 1e-12);
        let skipped = cm.miou(&[0, 1, 2], UndefinedPolicy::Skip).unwrap();
        assert!((skipped - (0.5 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn accumulation_is_additive_across_shards() {
        let gt: Vec<u8> = (0..40).map(|i| (i % 5) as u8).collect();
        let pred: Vec<u8> = (0..40).map(|i| ((i * 3) % 5) as u8).collect();

        let mut whole = ConfusionMatrix::new(5);
        whole.accumulate(&gt, &pred).unwrap();

        let mut halves = ConfusionMatrix::new(5);
        halves.accumulate(&gt[..17], &pred[..17]).unwrap();
        halves.accumulate(&gt[17..], &pred[17..]).unwrap();
        assert_eq!(whole, halves);

        let mut merged = ConfusionMatrix::new(5);
        let mut part = ConfusionMatrix::new(5);
        part.accumulate(&gt[..23], &pred[..23]).unwrap();
        merged.merge(&part).unwrap();
        let mut part2 = ConfusionMatrix::new(5);
        part2.accumulate(&gt[23..], &pred[23..]).unwrap();
        merged.merge(&part2).unwrap();
        assert_eq!(whole, merged);
    }
}

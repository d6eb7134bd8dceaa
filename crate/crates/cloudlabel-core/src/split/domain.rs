//! Domain-adaptation sub-splits: restricting an optimized split's train and
//! test memberships by season or environment tags.

use serde::{Deserialize, Serialize};

use super::{SampleRecord, SetKind, SplitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagKind {
    Season,
    Environment,
}

/// Train on samples tagged `train_tag`, test on samples tagged `test_tag`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainFilter {
    pub kind: TagKind,
    pub train_tag: String,
    pub test_tag: String,
}

/// A filtered sub-split. Classes whose count falls below the floor on either
/// side are flagged for exclusion from evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubSplit {
    pub train: Vec<u32>,
    pub test: Vec<u32>,
    pub excluded_classes: Vec<usize>,
}

/// Restricts an assignment's train and test sets by tag. Filtering only
/// removes samples, so the geographic buffer invariant of the source split
/// is preserved.
pub fn domain_subsplit(
    sets: &[SetKind],
    samples: &[SampleRecord],
    filter: &DomainFilter,
    min_class_count: u64,
) -> Result<SubSplit, SplitError> {
    fn tag_of(s: &SampleRecord, kind: TagKind) -> &str {
        match kind {
            TagKind::Season => &s.season,
            TagKind::Environment => &s.environment,
        }
    }
    let tag = |s: &SampleRecord| tag_of(s, filter.kind).to_string();
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, (set, sample)) in sets.iter().zip(samples).enumerate() {
        match set {
            SetKind::Train if tag(sample) == filter.train_tag => train.push(i as u32),
            SetKind::Test if tag(sample) == filter.test_tag => test.push(i as u32),
            _ => {}
        }
    }
    if train.is_empty() || test.is_empty() {
        return Err(SplitError::EmptyAfterFilter);
    }

    let num_classes = samples.first().map_or(0, |s| s.class_counts.len());
    let side_counts = |idx: &[u32]| -> Vec<u64> {
        let mut counts = vec![0u64; num_classes];
        for &i in idx {
            for (c, &v) in samples[i as usize].class_counts.iter().enumerate() {
                counts[c] += v;
            }
        }
        counts
    };
    let train_counts = side_counts(&train);
    let test_counts = side_counts(&test);
    let excluded_classes: Vec<usize> = (0..num_classes)
        .filter(|&c| train_counts[c] < min_class_count || test_counts[c] < min_class_count)
        .collect();

    Ok(SubSplit {
        train,
        test,
        excluded_classes,
    })
}

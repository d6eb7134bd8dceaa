//! Split-quality metrics: class-distribution divergences of each set against
//! the whole (non-buffer) dataset, and the geographic silhouette coefficient.

use super::{SampleRecord, SetKind, SplitError};

/// Guard for the KL denominator; only reachable when a set somehow contains
/// mass for a class the global distribution lacks, which cannot happen for
/// sets that are subsets of the data.
const KL_EPS: f64 = 1.0e-9;

/// Per-set and global class distributions (normalized class-count sums over
/// non-buffer samples).
fn distributions(
    sets: &[SetKind],
    samples: &[SampleRecord],
) -> Result<([Vec<f64>; 3], Vec<f64>), SplitError> {
    let num_classes = samples.first().map_or(0, |s| s.class_counts.len());
    let mut per_set = [
        vec![0.0f64; num_classes],
        vec![0.0f64; num_classes],
        vec![0.0f64; num_classes],
    ];
    let mut global = vec![0.0f64; num_classes];
    for (set, sample) in sets.iter().zip(samples) {
        let slot = match set {
            SetKind::Train => 0usize,
            SetKind::Val => 1,
            SetKind::Test => 2,
            SetKind::Buffer => continue,
        };
        for (c, &count) in sample.class_counts.iter().enumerate() {
            per_set[slot][c] += count as f64;
            global[c] += count as f64;
        }
    }
    for (slot, kind) in SetKind::NON_BUFFER.iter().enumerate() {
        let total: f64 = per_set[slot].iter().sum();
        if total <= 0.0 {
            return Err(SplitError::EmptySet(*kind));
        }
        for v in per_set[slot].iter_mut() {
            *v /= total;
        }
    }
    let total: f64 = global.iter().sum();
    for v in global.iter_mut() {
        *v /= total;
    }
    Ok((per_set, global))
}

/// Label distribution divergence: the total-variation distance of each set's
/// class distribution from the global one, summed over the three sets. Zero
/// exactly when every set matches the global distribution.
pub fn metric_label_distribution(
    sets: &[SetKind],
    samples: &[SampleRecord],
) -> Result<f64, SplitError> {
    let (per_set, global) = distributions(sets, samples)?;
    Ok(per_set
        .iter()
        .map(|p| {
            0.5 * p
                .iter()
                .zip(&global)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
        })
        .sum())
}

/// Inverse-frequency weighted label distribution divergence: as the label
/// distribution metric, but each class term is divided by the global
/// frequency of that class, so rare classes dominate. Classes with zero
/// global frequency are skipped.
pub fn metric_inverse_frequency(
    sets: &[SetKind],
    samples: &[SampleRecord],
) -> Result<f64, SplitError> {
    let (per_set, global) = distributions(sets, samples)?;
    Ok(per_set
        .iter()
        .map(|p| {
            0.5 * p
                .iter()
                .zip(&global)
                .filter(|(_, &q)| q > 0.0)
                .map(|(a, &q)| (a - q).abs() / q)
                .sum::<f64>()
        })
        .sum())
}

/// Label KL divergence of each set from the global distribution, summed over
/// the three sets, with `0 ln 0 = 0`.
pub fn metric_kl(sets: &[SetKind], samples: &[SampleRecord]) -> Result<f64, SplitError> {
    let (per_set, global) = distributions(sets, samples)?;
    Ok(per_set
        .iter()
        .map(|p| {
            p.iter()
                .zip(&global)
                .filter(|(&a, _)| a > 0.0)
                .map(|(&a, &q)| a * (a / q.max(KL_EPS)).ln())
                .sum::<f64>()
        })
        .sum())
}

/// Cached pairwise planar distances. For large sample counts the cache is
/// skipped and distances are recomputed on demand.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    n: usize,
    xy: Vec<[f64; 2]>,
    /// Condensed upper triangle, when cached.
    flat: Option<Vec<f64>>,
}

/// Caching limit: 3000 samples is a 36 MB triangle.
const CACHE_LIMIT: usize = 3000;

impl PairwiseDistances {
    pub fn build(samples: &[SampleRecord]) -> Self {
        let n = samples.len();
        let xy: Vec<[f64; 2]> = samples.iter().map(|s| s.xy).collect();
        let flat = if n <= CACHE_LIMIT {
            let mut flat = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    flat.push(planar_distance(&xy[i], &xy[j]));
                }
            }
            Some(flat)
        } else {
            None
        };
        Self { n, xy, flat }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        match &self.flat {
            Some(flat) => flat[i * self.n - i * (i + 1) / 2 + (j - i - 1)],
            None => planar_distance(&self.xy[i], &self.xy[j]),
        }
    }
}

#[inline]
fn planar_distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

/// Exact silhouette coefficient over planar distances with the three
/// non-buffer sets as clusters: for each sample, `a` is its mean distance to
/// the rest of its own set, `b` the smallest mean distance to another set,
/// and the score is the mean of `(b - a) / max(a, b)`. Buffer samples are
/// excluded entirely.
pub fn metric_silhouette(
    sets: &[SetKind],
    samples: &[SampleRecord],
    distances: &PairwiseDistances,
) -> Result<f64, SplitError> {
    let mut members: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (i, set) in sets.iter().enumerate() {
        match set {
            SetKind::Train => members[0].push(i),
            SetKind::Val => members[1].push(i),
            SetKind::Test => members[2].push(i),
            SetKind::Buffer => {}
        }
    }
    for (slot, kind) in SetKind::NON_BUFFER.iter().enumerate() {
        match members[slot].len() {
            0 => return Err(SplitError::EmptySet(*kind)),
            1 => return Err(SplitError::SingletonSet(*kind)),
            _ => {}
        }
    }
    let _ = samples;

    let mut total = 0.0f64;
    let mut count = 0usize;
    for own in 0..3 {
        for &i in &members[own] {
            let mut mean_to = [0.0f64; 3];
            for other in 0..3 {
                let mut sum = 0.0;
                for &j in &members[other] {
                    sum += distances.get(i, j);
                }
                let denom = if other == own {
                    (members[other].len() - 1) as f64
                } else {
                    members[other].len() as f64
                };
                mean_to[other] = sum / denom;
            }
            let a = mean_to[own];
            let b = (0..3)
                .filter(|&s| s != own)
                .map(|s| mean_to[s])
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            total += if m > 0.0 { (b - a) / m } else { 0.0 };
            count += 1;
        }
    }
    Ok(total / count as f64)
}

//! Deterministic planar k-means for chunking samples along the trajectory.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{SampleRecord, SplitError};

const MAX_ITERATIONS: usize = 300;

/// Groups samples into `k` spatial chunks by Lloyd's algorithm over their
/// (x, y) coordinates, seeded by farthest-point selection from an RNG-chosen
/// start. Deterministic for a fixed seed; ties always break toward the lower
/// index.
pub fn kmeans_chunks(
    samples: &[SampleRecord],
    k: usize,
    seed: u64,
) -> Result<Vec<u32>, SplitError> {
    if samples.len() < k {
        return Err(SplitError::TooFewSamples {
            have: samples.len(),
            need: k,
        });
    }
    let points: Vec<[f64; 2]> = samples.iter().map(|s| s.xy).collect();
    Ok(lloyd(&points, k, seed))
}

fn lloyd(points: &[[f64; 2]], k: usize, seed: u64) -> Vec<u32> {
    let n = points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Farthest-point seeding: the first center is random, each next center is
    // the sample farthest from all chosen centers.
    let mut centers: Vec<[f64; 2]> = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)]);
    let mut min_d2: Vec<f64> = points.iter().map(|p| d2(p, &centers[0])).collect();
    while centers.len() < k {
        let mut far = 0usize;
        for i in 1..n {
            if min_d2[i] > min_d2[far] {
                far = i;
            }
        }
        centers.push(points[far]);
        let c = centers[centers.len() - 1];
        for i in 0..n {
            let d = d2(&points[i], &c);
            if d < min_d2[i] {
                min_d2[i] = d;
            }
        }
    }

    let mut assignment = vec![0u32; n];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = d2(p, &centers[0]);
            for (c, center) in centers.iter().enumerate().skip(1) {
                let d = d2(p, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[i] != best as u32 {
                assignment[i] = best as u32;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![[0.0f64; 2]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i] as usize;
            sums[c][0] += p[0];
            sums[c][1] += p[1];
            counts[c] += 1;
        }
        for c in 0..k {
            // Empty clusters keep their previous center.
            if counts[c] > 0 {
                centers[c] = [sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64];
            }
        }
    }
    assignment
}

fn d2(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

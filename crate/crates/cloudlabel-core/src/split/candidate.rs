//! Candidate split generation: random chunk assignment targeting the set
//! ratios by sample mass, buffer carving, and the class-coverage constraint.

use rand::Rng;

use super::{SampleRecord, SetKind, SplitConfig};

/// Precomputed per-sample lists of neighbors within the buffer distance
/// (strictly closer). Built once and shared by all candidates.
#[derive(Debug, Clone)]
pub struct NeighborLists {
    lists: Vec<Vec<u32>>,
}

impl NeighborLists {
    pub fn build(samples: &[SampleRecord], buffer_dist: f64) -> Self {
        let n = samples.len();
        let mut lists = vec![Vec::new(); n];
        if buffer_dist <= 0.0 || n == 0 {
            return Self { lists };
        }
        // Uniform grid with cell size = buffer distance: neighbors are always
        // within one cell ring.
        let cell = buffer_dist;
        let key = |xy: &[f64; 2]| -> (i64, i64) {
            ((xy[0] / cell).floor() as i64, (xy[1] / cell).floor() as i64)
        };
        let mut grid: std::collections::HashMap<(i64, i64), Vec<u32>> =
            std::collections::HashMap::new();
        for (i, s) in samples.iter().enumerate() {
            grid.entry(key(&s.xy)).or_default().push(i as u32);
        }
        let d2_max = buffer_dist * buffer_dist;
        for (i, s) in samples.iter().enumerate() {
            let (cx, cy) = key(&s.xy);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j as usize == i {
                            continue;
                        }
                        let o = &samples[j as usize].xy;
                        let ddx = s.xy[0] - o[0];
                        let ddy = s.xy[1] - o[1];
                        if ddx * ddx + ddy * ddy < d2_max {
                            lists[i].push(j);
                        }
                    }
                }
            }
        }
        Self { lists }
    }

    pub fn of(&self, i: usize) -> &[u32] {
        &self.lists[i]
    }
}

/// Generates one candidate: chunks are drawn into train/val/test with
/// probabilities proportional to each set's remaining sample-mass deficit
/// (targets = ratios), the buffer rule is applied to a fixed point, and the
/// candidate is rejected (`None`) unless every globally present class occurs
/// in every set.
pub fn generate_candidate(
    samples: &[SampleRecord],
    chunks: &[u32],
    cfg: &SplitConfig,
    neighbors: &NeighborLists,
    rng: &mut impl Rng,
) -> Option<Vec<SetKind>> {
    let num_chunks = chunks.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut chunk_sizes = vec![0usize; num_chunks];
    for &c in chunks {
        chunk_sizes[c as usize] += 1;
    }

    // Visit chunks in random order; draw each into a set with probability
    // proportional to that set's remaining deficit toward its target mass.
    let mut order: Vec<usize> = (0..num_chunks).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let total_mass: f64 = samples.len() as f64;
    let targets: [f64; 3] = [
        cfg.ratios[0] * total_mass,
        cfg.ratios[1] * total_mass,
        cfg.ratios[2] * total_mass,
    ];
    let mut assigned_mass = [0.0f64; 3];
    let mut chunk_set = vec![SetKind::Train; num_chunks];
    for &c in &order {
        let deficits: [f64; 3] = [
            (targets[0] - assigned_mass[0]).max(0.0),
            (targets[1] - assigned_mass[1]).max(0.0),
            (targets[2] - assigned_mass[2]).max(0.0),
        ];
        let total_deficit: f64 = deficits.iter().sum();
        let weights = if total_deficit > 0.0 {
            deficits
        } else {
            cfg.ratios
        };
        let sum: f64 = weights.iter().sum();
        let mut draw = rng.gen_range(0.0..sum);
        let mut pick = 2usize;
        for (s, &w) in weights.iter().enumerate() {
            if draw < w {
                pick = s;
                break;
            }
            draw -= w;
        }
        chunk_set[c] = SetKind::NON_BUFFER[pick];
        assigned_mass[pick] += chunk_sizes[c] as f64;
    }

    let mut sets: Vec<SetKind> = chunks.iter().map(|&c| chunk_set[c as usize]).collect();
    apply_buffer(&mut sets, neighbors);

    if class_coverage_ok(samples, &sets) {
        Some(sets)
    } else {
        None
    }
}

/// Moves every sample that has a neighbor (closer than the buffer distance)
/// in a different non-buffer set into the buffer. The rule is symmetric and
/// repeated until stable.
pub fn apply_buffer(sets: &mut [SetKind], neighbors: &NeighborLists) {
    loop {
        let mut to_buffer: Vec<usize> = Vec::new();
        for i in 0..sets.len() {
            if sets[i] == SetKind::Buffer {
                continue;
            }
            let conflict = neighbors
                .of(i)
                .iter()
                .any(|&j| sets[j as usize] != SetKind::Buffer && sets[j as usize] != sets[i]);
            if conflict {
                to_buffer.push(i);
            }
        }
        if to_buffer.is_empty() {
            return;
        }
        for i in to_buffer {
            sets[i] = SetKind::Buffer;
        }
    }
}

/// True when every class that occurs anywhere occurs in each of train, val,
/// and test (and none of the three is empty).
pub fn class_coverage_ok(samples: &[SampleRecord], sets: &[SetKind]) -> bool {
    let num_classes = samples.first().map_or(0, |s| s.class_counts.len());
    let mut global = vec![false; num_classes];
    let mut per_set = [
        vec![false; num_classes],
        vec![false; num_classes],
        vec![false; num_classes],
    ];
    let mut set_nonempty = [false; 3];
    for (s, sample) in sets.iter().zip(samples) {
        let slot = match s {
            SetKind::Train => 0usize,
            SetKind::Val => 1,
            SetKind::Test => 2,
            SetKind::Buffer => {
                for (c, &count) in sample.class_counts.iter().enumerate() {
                    if count > 0 {
                        global[c] = true;
                    }
                }
                continue;
            }
        };
        set_nonempty[slot] = true;
        for (c, &count) in sample.class_counts.iter().enumerate() {
            if count > 0 {
                global[c] = true;
                per_set[slot][c] = true;
            }
        }
    }
    if !set_nonempty.iter().all(|&b| b) {
        return false;
    }
    for c in 0..num_classes {
        if global[c] && !(per_set[0][c] && per_set[1][c] && per_set[2][c]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(x: f64, y: f64, counts: Vec<u64>) -> SampleRecord {
        SampleRecord {
            id: format!("{x},{y}"),
            xy: [x, y],
            class_counts: counts,
            sequence: String::new(),
            season: String::new(),
            environment: String::new(),
        }
    }

    #[test]
    fn distant_chunks_need_no_buffer() {
        let samples = vec![
            sample(0.0, 0.0, vec![1, 1]),
            sample(1.0, 0.0, vec![1, 1]),
            sample(200.0, 0.0, vec![1, 1]),
            sample(201.0, 0.0, vec![1, 1]),
        ];
        let neighbors = NeighborLists::build(&samples, 45.0);
        let mut sets = vec![SetKind::Train, SetKind::Train, SetKind::Test, SetKind::Test];
        apply_buffer(&mut sets, &neighbors);
        assert!(!sets.contains(&SetKind::Buffer));
    }

    #[test]
    fn cross_set_pair_closer_than_buffer_gets_buffered() {
        let samples = vec![sample(0.0, 0.0, vec![1]), sample(40.0, 0.0, vec![1])];
        let neighbors = NeighborLists::build(&samples, 45.0);
        let mut sets = vec![SetKind::Train, SetKind::Test];
        apply_buffer(&mut sets, &neighbors);
        // Both ends of the violating pair go to the buffer (symmetric rule),
        // and the distance invariant holds vacuously.
        assert_eq!(sets, vec![SetKind::Buffer, SetKind::Buffer]);
    }

    #[test]
    fn buffer_invariant_holds_after_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let samples: Vec<SampleRecord> = (0..300)
            .map(|_| {
                sample(
                    rng.gen_range(0.0..1000.0),
                    rng.gen_range(0.0..1000.0),
                    vec![1],
                )
            })
            .collect();
        let neighbors = NeighborLists::build(&samples, 45.0);
        let mut sets: Vec<SetKind> = (0..300)
            .map(|_| SetKind::NON_BUFFER[rng.gen_range(0..3)])
            .collect();
        apply_buffer(&mut sets, &neighbors);
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                if sets[i] == SetKind::Buffer || sets[j] == SetKind::Buffer || sets[i] == sets[j] {
                    continue;
                }
                let dx = samples[i].xy[0] - samples[j].xy[0];
                let dy = samples[i].xy[1] - samples[j].xy[1];
                assert!(
                    (dx * dx + dy * dy).sqrt() >= 45.0,
                    "cross-set pair ({i},{j}) too close"
                );
            }
        }
    }

    #[test]
    fn class_present_in_single_chunk_forces_rejection() {
        // Class 1 exists only in the first two samples (one chunk); wherever
        // that chunk lands, the other two sets lack class 1.
        let samples = vec![
            sample(0.0, 0.0, vec![1, 1]),
            sample(1.0, 0.0, vec![1, 1]),
            sample(500.0, 0.0, vec![1, 0]),
            sample(501.0, 0.0, vec![1, 0]),
            sample(1000.0, 0.0, vec![1, 0]),
            sample(1001.0, 0.0, vec![1, 0]),
        ];
        let chunks = vec![0, 0, 1, 1, 2, 2];
        let cfg = SplitConfig {
            k: 3,
            num_candidates: 1,
            ..SplitConfig::default()
        };
        let neighbors = NeighborLists::build(&samples, cfg.buffer_dist);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert!(generate_candidate(&samples, &chunks, &cfg, &neighbors, &mut rng).is_none());
        }
    }

    #[test]
    fn neighbor_lists_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let samples: Vec<SampleRecord> = (0..120)
            .map(|_| sample(rng.gen_range(0.0..300.0), rng.gen_range(0.0..300.0), vec![1]))
            .collect();
        let lists = NeighborLists::build(&samples, 45.0);
        for i in 0..samples.len() {
            let mut expected: Vec<u32> = (0..samples.len() as u32)
                .filter(|&j| {
                    if j as usize == i {
                        return false;
                    }
                    let dx = samples[i].xy[0] - samples[j as usize].xy[0];
                    let dy = samples[i].xy[1] - samples[j as usize].xy[1];
                    (dx * dx + dy * dy).sqrt() < 45.0
                })
                .collect();
            let mut got = lists.of(i).to_vec();
            got.sort_unstable();
            expected.sort_unstable();
            assert_eq!(got, expected, "neighbor list of {i}");
        }
    }
}

//! Split-generation benchmarks: k-means chunking, the silhouette metric, and
//! a small end-to-end optimization.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cloudlabel_core::split::{
    kmeans_chunks, metric_silhouette, optimize_split, PairwiseDistances, SampleRecord, SetKind,
    SplitConfig,
};

fn trail_samples(n: usize) -> Vec<SampleRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..n)
        .map(|i| SampleRecord {
            id: format!("s{i}"),
            xy: [
                i as f64 * 10.0 + rng.gen_range(-1.0..1.0),
                if i % 2 == 0 { 0.0 } else { 50_000.0 },
            ],
            class_counts: (0..15).map(|c| 10 + ((i + c) % 37) as u64).collect(),
            sequence: String::new(),
            season: String::new(),
            environment: String::new(),
        })
        .collect()
}

fn bench_kmeans(c: &mut Criterion) {
    let samples = trail_samples(2_000);
    c.bench_function("kmeans_chunks_2000x50", |b| {
        b.iter(|| kmeans_chunks(black_box(&samples), 50, 0).unwrap())
    });
}

fn bench_silhouette(c: &mut Criterion) {
    let samples = trail_samples(2_000);
    let distances = PairwiseDistances::build(&samples);
    let sets: Vec<SetKind> = (0..samples.len())
        .map(|i| SetKind::NON_BUFFER[i % 3])
        .collect();
    c.bench_function("silhouette_2000", |b| {
        b.iter(|| metric_silhouette(black_box(&sets), &samples, &distances).unwrap())
    });
}

fn bench_optimize(c: &mut Criterion) {
    let samples = trail_samples(500);
    let cfg = SplitConfig {
        k: 25,
        num_candidates: 50,
        ..SplitConfig::default()
    };
    let mut group = c.benchmark_group("optimize_split");
    group.sample_size(10);
    group.bench_function("500x50", |b| {
        b.iter(|| optimize_split(black_box(&samples), &cfg).unwrap().candidates_accepted)
    });
    group.finish();
}

criterion_group!(benches, bench_kmeans, bench_silhouette, bench_optimize);
criterion_main!(benches);

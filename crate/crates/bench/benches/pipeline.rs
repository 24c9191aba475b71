use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use csd_core::analysis::{analyze_collection, AnalysisConfig};
use csd_core::build_conjugate_ensemble;
use csd_core::synthetic::{gaussian_network, WeightScale, MIXED_TOPOLOGY};

fn conjugate_ensemble(c: &mut Criterion) {
    let orders: Vec<usize> = MIXED_TOPOLOGY.iter().map(|s| s[0]).collect();
    c.bench_function("build_conjugate_ensemble/mixed10", |b| {
        b.iter(|| build_conjugate_ensemble(black_box(&orders), 7, 1).unwrap())
    });
}

fn analyze(c: &mut Criterion) {
    let net = gaussian_network(MIXED_TOPOLOGY, 11, WeightScale::FanIn, "mixed10").unwrap();
    let config = AnalysisConfig::default();
    let mut group = c.benchmark_group("analyze");
    group.sample_size(10);
    group.bench_function("mixed10", |b| {
        b.iter(|| analyze_collection(black_box(&net), &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, conjugate_ensemble, analyze);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use csd_core::circular_ensemble::{modulus_matrix, sample_cue_unitary, sample_gue_hermitian};
use csd_core::eigen::{eig_general, eig_symmetric, hermitian_eig};
use csd_core::layer_ensemble::gram_of_matrix;
use csd_core::{Matrix, RngState};

fn gaussian(n: usize, seed: u64) -> Matrix {
    let mut s = RngState::new(seed, 0).stream();
    Matrix::from_vec(n, n, (0..n * n).map(|_| s.normal()).collect())
}

fn symmetric(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_symmetric");
    for n in [64usize, 256, 512] {
        let x = gram_of_matrix(&gaussian(n, 1));
        group.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| eig_symmetric(black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn general(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig_general_modulus_cue");
    group.sample_size(10);
    for n in [64usize, 256] {
        let a = modulus_matrix(&sample_cue_unitary(n, RngState::new(2, 0)).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| eig_general(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn hermitian(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    group.sample_size(10);
    for n in [64usize, 256] {
        let h = sample_gue_hermitian(n, RngState::new(3, 0)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| hermitian_eig(black_box(h)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, symmetric, general, hermitian);
criterion_main!(benches);

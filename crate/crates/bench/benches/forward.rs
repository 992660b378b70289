use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use jumpsl::spectrum::{char_delta, eigenvalues, spectral_data};
use jumpsl_bench::{four_jumps, one_jump};
use num_complex::Complex64;

fn delta(c: &mut Criterion) {
    let p = one_jump();
    let q = four_jumps();
    c.bench_function("char_delta/one_jump", |b| {
        b.iter(|| char_delta(&p, black_box(Complex64::new(400.0, 3.0))))
    });
    c.bench_function("char_delta/four_jumps", |b| {
        b.iter(|| char_delta(&q, black_box(Complex64::new(400.0, 3.0))))
    });
}

fn spectrum(c: &mut Criterion) {
    let p = one_jump();
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    group.bench_function("eigenvalues/20", |b| b.iter(|| eigenvalues(&p, black_box(20)).unwrap()));
    let eigs = eigenvalues(&p, 20).unwrap();
    group.bench_function("spectral_data/20", |b| b.iter(|| spectral_data(&p, black_box(&eigs)).unwrap()));
    group.finish();
}

criterion_group!(benches, delta, spectrum);
criterion_main!(benches);

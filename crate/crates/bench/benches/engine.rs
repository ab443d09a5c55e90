use std::hint::black_box;

use atlas_core::atlas::build_atlas;
use atlas_core::classify::classify;
use atlas_core::corpus::builtin;
use atlas_core::volume::mixed_volume;
use atlas_core::{Support, SupportTuple};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bk_corpus() -> Vec<(&'static str, SupportTuple)> {
    builtin()
        .into_iter()
        .filter(|(_, t)| t.len() == t.ambient_rank())
        .collect()
}

fn bench_mixed_volume(c: &mut Criterion) {
    let mut g = c.benchmark_group("mixed_volume");
    for (name, t) in bk_corpus() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &t, |b, t| {
            b.iter(|| mixed_volume(black_box(t)).unwrap())
        });
    }
    for n in 2..=4 {
        let t = SupportTuple::new(n, vec![Support::standard_simplex(n); n]).unwrap();
        g.bench_with_input(BenchmarkId::new("simplexes", n), &t, |b, t| {
            b.iter(|| mixed_volume(black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn bench_classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for (name, t) in builtin() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &t, |b, t| {
            b.iter(|| classify(black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn bench_atlas(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_atlas");
    g.sample_size(20);
    for (name, t) in builtin() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &t, |b, t| {
            b.iter(|| build_atlas(black_box(t), true).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_mixed_volume, bench_classify, bench_atlas);
criterion_main!(benches);

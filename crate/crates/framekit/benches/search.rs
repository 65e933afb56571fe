//! Parallel vs sequential search benchmarks. The data-parallel splits sit
//! at the top of the placement tree, so the comparison shows what rayon
//! buys on multi-core hosts (and costs on single-core ones).

use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};

use framekit::rep::{enumerate_l_biased, Cache};
use framekit::verify;
use framekit::{named, SearchLimits};

fn limits(parallel: bool) -> SearchLimits {
    SearchLimits {
        parallel,
        node_budget: 100_000_000,
        time_budget: Duration::from_secs(600),
        ..Default::default()
    }
}

fn bench_representations(c: &mut Criterion) {
    let mut group = c.benchmark_group("representations_mk33p");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let m = named::build_named("MK33p*").unwrap().matroid;
    group.bench_function("parallel", |b| {
        b.iter(|| enumerate_l_biased(&m, 0, &limits(true)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| enumerate_l_biased(&m, 0, &limits(false)))
    });
    group.finish();
}

fn bench_verify_n9(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_n9");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let n9 = named::build_n9();
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let cache = Cache::in_memory();
            verify::verify_excluded_minor("N9", &n9, &limits(true), &cache)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let cache = Cache::in_memory();
            verify::verify_excluded_minor("N9", &n9, &limits(false), &cache)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_representations, bench_verify_n9);
criterion_main!(benches);

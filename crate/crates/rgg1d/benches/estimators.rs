//! Parallel vs sequential throughput of the Monte Carlo estimators.
//!
//! Both paths produce bit-identical results; this suite measures what the
//! rayon fan-out buys on the main workloads. Run with
//! `cargo bench -p rgg1d`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rgg1d::montecarlo::{estimate, estimate_sequential, Statistic};
use rgg1d::ModelParams;

fn bench_connectivity(c: &mut Criterion) {
    let mut group = c.benchmark_group("connectivity_estimate");
    group.sample_size(10);
    for &n in &[200u64, 2_000] {
        let params = ModelParams::exponential(n, 1.0, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("parallel", n), &params, |b, p| {
            b.iter(|| estimate(p, Statistic::Connectivity, 20_000, 42, false).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &params, |b, p| {
            b.iter(|| estimate_sequential(p, Statistic::Connectivity, 20_000, 42, false).unwrap())
        });
    }
    group.finish();
}

fn bench_conditioned_redundancy(c: &mut Criterion) {
    let mut group = c.benchmark_group("redundant_conditioned");
    group.sample_size(10);
    let params = ModelParams::exponential(20, 1.0, 1.0).unwrap();
    group.bench_function("parallel", |b| {
        b.iter(|| estimate(&params, Statistic::RedundantCount, 20_000, 42, true).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            estimate_sequential(&params, Statistic::RedundantCount, 20_000, 42, true).unwrap()
        })
    });
    group.finish();
}

fn bench_gstar_sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("gstar_sweep_cell");
    group.sample_size(10);
    let params = ModelParams::gstar(2_000, 1.0, 5e-3, 1.0).unwrap();
    group.bench_function("parallel", |b| {
        b.iter(|| estimate(&params, Statistic::Connectivity, 10_000, 7, false).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| estimate_sequential(&params, Statistic::Connectivity, 10_000, 7, false).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_connectivity,
    bench_conditioned_redundancy,
    bench_gstar_sampler
);
criterion_main!(benches);

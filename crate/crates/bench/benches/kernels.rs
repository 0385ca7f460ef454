use cocycle_lab_bench::Workloads;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn cocycle(c: &mut Criterion) {
    let w = Workloads::new();
    let mut g = c.benchmark_group("cocycle");
    for n in [1_000, 100_000] {
        g.bench_with_input(BenchmarkId::new("orbit_mle", n), &n, |b, &n| b.iter(|| w.orbit_mle(black_box(n))));
    }
    g.bench_function("spectrum_10k", |b| b.iter(|| w.spectrum(black_box(10_000))));
    g.bench_function("measure_mle_8", |b| b.iter(|| w.measure_mle(black_box(8))));
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let w = Workloads::new();
    let mut g = c.benchmark_group("dynamics");
    g.bench_function("shadow_100", |b| b.iter(|| w.shadowing(100, black_box(3))));
    g.bench_function("lyapunov_k", |b| b.iter(|| w.lyapunov_k(black_box(0.1))));
    g.finish();
}

fn entropy(c: &mut Criterion) {
    let w = Workloads::new();
    let mut g = c.benchmark_group("entropy");
    g.bench_function("topological_64", |b| b.iter(|| w.topological(black_box(64))));
    g.bench_function("cover_64", |b| b.iter(|| w.cover(black_box(64))));
    g.bench_function("katok_16", |b| b.iter(|| w.katok(black_box(16))));
    g.sample_size(10);
    g.bench_function("edp_tiny_scheme", |b| b.iter(|| w.edp()));
    g.finish();
}

criterion_group!(benches, cocycle, dynamics, entropy);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlcone_bench::cases;
use nlcone_core::curvature_solver::{alpha0, solve_alpha, DEFAULT_ALPHA_TOL};
use nlcone_core::oracle::mc_surface_integral;
use nlcone_core::SurfaceIntegrand;
use std::hint::black_box;

fn apertures(c: &mut Criterion) {
    let mut g = c.benchmark_group("aperture");
    g.sample_size(10);
    for (m, n) in [(3, 1), (4, 3)] {
        let id = format!("{m}x{n}");
        g.bench_function(BenchmarkId::new("alpha0", &id), |b| {
            b.iter(|| alpha0(black_box(m), n, 1e-12).unwrap())
        });
        g.bench_function(BenchmarkId::new("solve_alpha", &id), |b| {
            b.iter(|| solve_alpha(black_box(m), n, 0.3, DEFAULT_ALPHA_TOL).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    for (name, p) in cases() {
        g.bench_function(BenchmarkId::new("alignment_1e5", name), |b| {
            b.iter(|| mc_surface_integral(black_box(&p), SurfaceIntegrand::NormalAlignment, 100_000, 0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, apertures, monte_carlo);
criterion_main!(benches);

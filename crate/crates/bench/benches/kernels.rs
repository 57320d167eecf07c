use std::hint::black_box;

use bel_core::construction::{build_example_on, verify_theorem};
use bel_core::geometry::{comparison_report, weighted_volume};
use bel_core::lane_emden::solve_radial;
use bel_core::pfunction::{bubble_on, divergence_identity_residual, v_transform};
use bel_core::{make_grid, ModelManifold, Spacing};
use criterion::{criterion_group, criterion_main, Criterion};

fn grid(c: &mut Criterion) {
    c.bench_function("make_grid geometric 4096", |b| {
        b.iter(|| make_grid(0.0, black_box(1e3), 4096, Spacing::Geometric).unwrap())
    });
    let g = make_grid(0.0, 1e3, 4096, Spacing::Geometric).unwrap();
    let m = build_example_on(g, 3, 0.5, 0.0).unwrap();
    c.bench_function("weighted_volume constructed", |b| {
        b.iter(|| weighted_volume(&m, black_box(537.0)).unwrap())
    });
    c.bench_function("comparison_report constructed", |b| {
        b.iter(|| comparison_report(&m, black_box(1e3)).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let g = make_grid(0.0, 1e3, 4096, Spacing::Geometric).unwrap();
    let flat = ModelManifold::euclidean(4, g.clone()).unwrap();
    c.bench_function("solve_radial d=4 bubble", |b| {
        b.iter(|| solve_radial(&flat, 3.0, black_box(1.0), 1e3, 1e-10).unwrap())
    });
    let m = build_example_on(g, 3, 0.5, 0.0).unwrap();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("verify_theorem d=3 p=5", |b| {
        b.iter(|| verify_theorem(&m, 5.0, black_box(1.0)).unwrap())
    });
    group.finish();
}

fn pfunction(c: &mut Criterion) {
    let g = make_grid(0.0, 1e3, 4096, Spacing::Geometric).unwrap();
    let profile = bubble_on(g, 4, 0.125).unwrap();
    c.bench_function("v_transform d=4 bubble", |b| {
        b.iter(|| v_transform(black_box(&profile)).unwrap())
    });
    let data = v_transform(&profile).unwrap();
    c.bench_function("divergence identity d=4 bubble", |b| {
        b.iter(|| divergence_identity_residual(black_box(&data)).unwrap())
    });
}

criterion_group!(benches, grid, solver, pfunction);
criterion_main!(benches);

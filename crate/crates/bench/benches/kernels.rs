use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wgquant_core::fields::{self, Excitation};
use wgquant_core::geometry::{Family, Geometry, Mode, ModeId};
use wgquant_core::motion::{self, QuadratureGrid, QuadraturePath};
use wgquant_core::{quanta, verify, Quadratures};

fn rect_mode() -> Mode {
    let g = Geometry::rectangular(0.02, 0.013, 0.05).unwrap();
    Mode::new(g, ModeId::new(Family::TmRect { n: 2, m: 1 }, 3)).unwrap()
}

fn field_eval(c: &mut Criterion) {
    let m = rect_mode();
    let exc = Excitation::canonical(&m, 1.0, Quadratures::new(1.0, 0.5));
    c.bench_function("eval_fields", |b| {
        b.iter(|| fields::eval_fields(&m, &exc, black_box([0.003, -0.002, 0.01]), black_box(1e-11)))
    });
    let pts = fields::interior_grid(&m, 5, 5, 5);
    let st = fields::default_stencil(&m);
    c.bench_function("maxwell_residual_125", |b| {
        b.iter(|| fields::maxwell_residual(&m, &exc, black_box(&pts), 0.0, &st))
    });
}

fn quadrature(c: &mut Criterion) {
    let m = rect_mode();
    let exc = Excitation::canonical(&m, 1.0, Quadratures::new(1.0, 0.5));
    let grid = QuadratureGrid::default_for(&m);
    for (name, path) in [
        ("motion_fast", QuadraturePath::Fast),
        ("motion_oracle", QuadraturePath::Oracle),
    ] {
        c.bench_function(name, |b| {
            b.iter(|| motion::motion_by_quadrature(&m, &exc, black_box(0.0), &grid, path))
        });
    }
}

fn sweeps(c: &mut Criterion) {
    let d = 0.01;
    let g = Geometry::rectangular(d, d, 100.0 * d).unwrap();
    let ls: Vec<i64> = (1..=10_000).collect();
    c.bench_function("zpf_sweep_10k", |b| {
        b.iter(|| quanta::zpf_ratio_sweep(&g, Family::TmRect { n: 1, m: 1 }, black_box(&ls)))
    });
    c.bench_function("ladder_check_16", |b| {
        b.iter(|| quanta::ladder_algebra_check(black_box(16), 0.3))
    });
    let m = rect_mode();
    let mut group = c.benchmark_group("report");
    group.sample_size(10);
    group.bench_function("verify", |b| {
        b.iter(|| verify::verify(&m, &verify::VerifyOptions::default()))
    });
    group.finish();
}

criterion_group!(benches, field_eval, quadrature, sweeps);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use sparse_bellman_bench::{domain_points, random_pair};
use sparse_bellman_core::closedform::{bellman_m, boundary_f, envelope_phi};
use sparse_bellman_core::operators::{apply_maximal, apply_power_mean, apply_sparse_power};
use sparse_bellman_core::oracle::{dp_value_iteration, GridSpec};

fn bench_closed_form(c: &mut Criterion) {
    let points = domain_points(512, 42);
    c.bench_function("bellman_m r=0.8 512pts", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &(w, a) in &points {
                acc += bellman_m(black_box(0.8), w, a).unwrap();
            }
            acc
        })
    });
    c.bench_function("boundary_f deep segment", |b| {
        b.iter(|| boundary_f(black_box(1.3), black_box(1e-7)).unwrap())
    });
    c.bench_function("envelope_phi", |b| {
        b.iter(|| envelope_phi(black_box(2.0), black_box(0.3), black_box(1.4)).unwrap())
    });
}

fn bench_operators(c: &mut Criterion) {
    let (seq, f) = random_pair(10, 7);
    c.bench_function("sparse_power depth 10", |b| {
        b.iter(|| apply_sparse_power(&seq, &f, black_box(1.5)).unwrap())
    });
    c.bench_function("power_mean depth 10", |b| {
        b.iter(|| apply_power_mean(&seq, &f, black_box(2.0)).unwrap())
    });
    c.bench_function("maximal depth 10", |b| {
        b.iter(|| apply_maximal(&seq, &f).unwrap())
    });
}

fn bench_value_iteration(c: &mut Criterion) {
    let grid = GridSpec::with_resolution(1.0, 101, 21, 3, 4).unwrap();
    c.bench_function("dp 101x21 depth 3", |b| {
        b.iter(|| dp_value_iteration(black_box(1.0), &grid).unwrap())
    });
}

criterion_group!(
    benches,
    bench_closed_form,
    bench_operators,
    bench_value_iteration
);
criterion_main!(benches);

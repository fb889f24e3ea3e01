//! Criterion benchmarks for the hot kernels.

use std::hint::black_box;

use brownian_diameter::analytic::{feller_density, perimeter_sq_integral, SeriesControl};
use brownian_diameter::geometry::{convex_hull, diameter_sq};
use brownian_diameter::path::{path_hull_stats, sample_ladder, sample_path, PathConfig, DOMAIN_BASE};
use brownian_diameter::DEFAULT_SEED;
use criterion::{BenchmarkId, Criterion, Throughput};

pub fn benchmarks(c: &mut Criterion) {
    paths(c);
    hulls(c);
    analytic(c);
}

fn paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_path");
    for n in [1024usize, 4096, 16384] {
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| sample_path(black_box(&PathConfig::new(n, DEFAULT_SEED, 7))).unwrap())
        });
    }
    group.finish();

    c.bench_function("ladder_1024_4096_16384", |b| {
        b.iter(|| sample_ladder(DEFAULT_SEED, DOMAIN_BASE, black_box(7), &[1024, 4096, 16384]).unwrap())
    });
}

fn hulls(c: &mut Criterion) {
    let mut group = c.benchmark_group("hull");
    for n in [1024usize, 4096, 16384] {
        let path = sample_path(&PathConfig::new(n, DEFAULT_SEED, 3)).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("convex_hull", n), &path, |b, p| {
            b.iter(|| convex_hull(black_box(p.points())).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("stats", n), &path, |b, p| b.iter(|| path_hull_stats(black_box(p))));
        let hull = convex_hull(path.points()).unwrap();
        group.bench_with_input(BenchmarkId::new("calipers", n), &hull, |b, h| b.iter(|| diameter_sq(black_box(h))));
    }
    group.finish();
}

fn analytic(c: &mut Criterion) {
    let ctl = SeriesControl::default();
    let mut group = c.benchmark_group("feller_density");
    for r in [0.1, 1.0, 5.0] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| feller_density(black_box(r), &ctl).unwrap())
        });
    }
    group.finish();
    c.bench_function("perimeter_sq_integral", |b| b.iter(|| perimeter_sq_integral(black_box(1e-8)).unwrap()));
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ectwin::arith::{factorize, primes_in_range};
use ectwin::census::run_census;
use ectwin::ec::{count_points_bsgs, count_points_naive};
use ectwin::gl2::{count_c_brute, BRUTE_FORCE_CAP};
use ectwin::koblitz::koblitz_constant;
use ectwin::sieve_theory::lower_bound_constant;
use ectwin::{CensusConfig, CurveModel, GaloisImageSpec};

fn curve() -> CurveModel {
    CurveModel::new(0, 0, 1, -1, 0).unwrap()
}

fn bench_factorize(c: &mut Criterion) {
    let mut g = c.benchmark_group("factorize");
    // Small smooth, a 62-bit semiprime, and a 64-bit prime.
    for n in [720_720u64, 2_147_483_647 * 2_147_483_629, 18_446_744_073_709_551_557] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| factorize(black_box(n)))
        });
    }
    g.finish();
}

fn bench_point_counts(c: &mut Criterion) {
    let e = curve();
    let mut g = c.benchmark_group("point_count");
    for p in [1_009u64, 100_003, 10_000_019] {
        g.bench_with_input(BenchmarkId::new("bsgs", p), &p, |b, &p| {
            b.iter(|| count_points_bsgs(&e, black_box(p)).unwrap())
        });
    }
    for p in [1_009u64, 100_003] {
        g.bench_with_input(BenchmarkId::new("naive", p), &p, |b, &p| {
            b.iter(|| count_points_naive(&e, black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn bench_gl2(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_c_brute");
    for n in [25u64, 49, 121] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| count_c_brute(black_box(n), BRUTE_FORCE_CAP).unwrap())
        });
    }
    g.finish();
}

fn bench_analytic(c: &mut Criterion) {
    let image = GaloisImageSpec::full(1).unwrap();
    c.bench_function("koblitz_constant_1e6", |b| {
        b.iter(|| koblitz_constant(&image, black_box(1_000_000)).unwrap())
    });
    c.bench_function("lower_bound_constant", |b| {
        b.iter(|| lower_bound_constant(black_box(0.5)).unwrap())
    });
    c.bench_function("primes_below_1e7", |b| b.iter(|| primes_in_range(0, black_box(10_000_000)).len()));
}

fn bench_census(c: &mut Criterion) {
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    let mut cfg = CensusConfig::new(curve(), GaloisImageSpec::full(1).unwrap(), 100_000).unwrap();
    cfg.constant_cutoff = 10_000;
    g.bench_function("x_1e5", |b| b.iter(|| run_census(cfg.clone()).unwrap().pi_twin));
    g.finish();
}

criterion_group!(
    benches,
    bench_factorize,
    bench_point_counts,
    bench_gl2,
    bench_analytic,
    bench_census
);
criterion_main!(benches);

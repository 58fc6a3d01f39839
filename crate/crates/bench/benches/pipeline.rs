//! Benchmarks for the hot paths: point counting, height-context setup
//! (Frobenius lift plus sigma series), single heights, and Weierstrass
//! preparation.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cyclorank_core::curve::{EllipticCurveQ, PointQ};
use cyclorank_core::heights::HeightContext;
use cyclorank_core::iwasawa::{weierstrass_preparation, ZpPowerSeries};
use cyclorank_core::reduction::fp::CurveFp;

fn rank_one_curve() -> EllipticCurveQ {
    EllipticCurveQ::from_ainvs(&[0, 0, 1, -1, 0]).unwrap()
}

fn bench_point_counting(c: &mut Criterion) {
    let e = rank_one_curve();
    let mut group = c.benchmark_group("point_counting");
    for p in [1009u64, 4001] {
        let ef = CurveFp::reduce(&e, p);
        group.bench_with_input(BenchmarkId::new("brute", p), &ef, |b, ef| {
            b.iter(|| ef.count_brute())
        });
        group.bench_with_input(BenchmarkId::new("bsgs", p), &ef, |b, ef| {
            b.iter(|| ef.count_bsgs())
        });
    }
    group.finish();
}

fn bench_height_context(c: &mut Criterion) {
    let e = rank_one_curve();
    let mut group = c.benchmark_group("height_context");
    group.sample_size(10);
    for p in [5u64, 13] {
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| HeightContext::new(&e, p, 8).unwrap())
        });
    }
    group.finish();
}

fn bench_height_evaluation(c: &mut Criterion) {
    let e = rank_one_curve();
    let ctx = HeightContext::new(&e, 5, 8).unwrap();
    let gen = PointQ::affine_int(0, 0);
    c.bench_function("height_37a1_p5", |b| b.iter(|| ctx.height(&gen).unwrap()));
}

fn bench_preparation(c: &mut Criterion) {
    let p = 5u64;
    let prec = 20u32;
    let mut rng = StdRng::seed_from_u64(7);
    let series: Vec<ZpPowerSeries> = (0..16)
        .map(|_| {
            let coeffs: Vec<i64> =
                (0..64).map(|_| rng.gen_range(-1_000_000..1_000_000)).collect();
            ZpPowerSeries::from_i64(p, &coeffs, prec)
        })
        .collect();
    c.bench_function("weierstrass_preparation", |b| {
        b.iter(|| {
            for s in &series {
                let _ = weierstrass_preparation(s).unwrap();
            }
        })
    });
}

criterion_group!(
    benches,
    bench_point_counting,
    bench_height_context,
    bench_height_evaluation,
    bench_preparation
);
criterion_main!(benches);

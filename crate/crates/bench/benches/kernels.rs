use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use opensets::baire::baire_point;
use opensets::enumerate::{first_in_open, nth_rational};
use opensets::heine_borel::hbc_rm;
use opensets::rational::{rat, tol};
use opensets::represent::{delta, r3_to_r4, r4_to_r3_fin, ExactPincherle};
use opensets::{covers, CauchyReal, ClosedRM, FinClosed, OpenR4};
use opensets_bench::{middle_third, punctured_half, rational_complement, scattered_pieces, two_gaps};

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    for n in [16, 256, 4096] {
        let pieces = scattered_pieces(n);
        let target = FinClosed::unit();
        group.bench_with_input(BenchmarkId::from_parameter(n), &pieces, |b, p| {
            b.iter(|| covers(black_box(&target), black_box(p)))
        });
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    c.bench_function("nth_rational/10000", |b| b.iter(|| nth_rational(black_box(10_000))));
    c.bench_function("first_in_open/narrow", |b| {
        let (lo, hi) = (rat(1, 3) - tol(16), rat(1, 3) + tol(16));
        b.iter(|| first_in_open(&lo, &hi, 1_000_000, |q| q != &rat(1, 3)))
    });
}

fn distance(c: &mut Criterion) {
    let y = punctured_half();
    let x = CauchyReal::constant(rat(3, 16));
    let mut group = c.benchmark_group("delta");
    for k in [4, 8, 16] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| delta(&y, &ExactPincherle, black_box(&x), k).unwrap())
        });
    }
    group.finish();
    let stream = r3_to_r4(&r4_to_r3_fin(&two_gaps()));
    c.bench_function("r3_to_r4/prefix-1000", |b| b.iter(|| stream.prefix(black_box(1000))));
}

fn heine_borel(c: &mut Criterion) {
    let closed = ClosedRM::from_fin_closed(&middle_third());
    let cover = OpenR4::tail_cover();
    c.bench_function("hbc_rm/middle-third", |b| b.iter(|| hbc_rm(&closed, &cover, 1000)));
    let wide = ClosedRM::from_fin_closed(&FinClosed::new([opensets::RatInterval::closed(rat(1, 200), rat(1, 1))]));
    c.bench_function("hbc_rm/near-zero", |b| b.iter(|| hbc_rm(&wide, &cover, 10_000)));
}

fn baire(c: &mut Criterion) {
    c.bench_function("baire_point/k10", |b| b.iter(|| baire_point(&rational_complement, 10, 100_000)));
}

criterion_group!(kernels, sweep, enumerate, distance, heine_borel, baire);
criterion_main!(kernels);

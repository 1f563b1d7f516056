use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gf2class_bench::family;
use gf2class_core::group::{commutator_space, fixed_space};
use gf2class_core::BitMatrix;

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("matrix product");
    for spec in ["symplectic:6", "f4-unitary:4", "transvection:12"] {
        let g = family(spec).generators;
        let (a, b) = (&g[0], &g[g.len() - 1]);
        group.bench_with_input(BenchmarkId::from_parameter(spec), &(a, b), |bench, (a, b)| {
            bench.iter(|| black_box(*a) * black_box(*b))
        });
    }
    group.finish();
}

fn reductions(c: &mut Criterion) {
    let seed = family("transvection:12").seed;
    let m = &seed + &BitMatrix::identity(12);
    c.bench_function("rank 12x12", |b| b.iter(|| black_box(&m).rank()));
    c.bench_function("kernel 12x12", |b| b.iter(|| black_box(&m).kernel()));
    c.bench_function("commutator and fixed space", |b| {
        b.iter(|| (commutator_space(black_box(&seed)), fixed_space(black_box(&seed))))
    });
}

criterion_group!(benches, products, reductions);
criterion_main!(benches);

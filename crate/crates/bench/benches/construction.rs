use bdlab_bench::{pool, pool_and_space};
use bdlab_core::sample::coordinate_vectors;
use bdlab_core::subspace::default_schedule;
use bdlab_core::x0::{build_space, X0Params};
use bdlab_core::{pair_search, pool_seminorm, BlockVector};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn construction(c: &mut Criterion) {
    c.bench_function("count_level_6", |b| {
        b.iter(|| bdlab_core::x0::level_cardinality(black_box(6), &X0Params::default()))
    });
    c.bench_function("enumerate_pool_q2", |b| b.iter(|| pool(black_box(2))));
    let p = pool(2);
    c.bench_function("build_space_q2", |b| b.iter(|| build_space(black_box(&p), 2).unwrap()));
}

fn checks(c: &mut Criterion) {
    let (pool, space) = pool_and_space(2);
    let samples = coordinate_vectors(&space, 50, 0);
    c.bench_function("fdd_check_50", |b| b.iter(|| space.fdd_check(black_box(&samples))));
    c.bench_function("duality_checks_q2", |b| b.iter(|| space.duality_checks()));

    let x = BlockVector::new(&pool, samples[7].clone()).unwrap();
    c.bench_function("pool_seminorm", |b| b.iter(|| pool_seminorm(&pool, black_box(&x)).unwrap()));
    let eps = default_schedule(&space);
    c.bench_function("pair_search_q2", |b| b.iter(|| pair_search(&space, black_box(&eps)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = construction, checks
}
criterion_main!(benches);

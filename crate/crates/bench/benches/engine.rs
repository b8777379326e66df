use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use sumfree_bench::{count_task, COUNT_WORKLOADS};
use sumfree_core::cyclic::{census_scsf, DEFAULT_CENSUS_LIMIT};
use sumfree_core::oracles::naive_count;
use sumfree_core::structures::enumerate_t_special;
use sumfree_core::{count_admissible, ConstraintProfile};

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_admissible");
    g.sample_size(10);
    for &(n, id) in COUNT_WORKLOADS {
        for workers in [1, 4] {
            let task = count_task(n, id, workers);
            g.bench_with_input(BenchmarkId::new(format!("{id}/w{workers}"), n), &task, |b, t| {
                b.iter(|| count_admissible(black_box(t)).unwrap())
            });
        }
    }
    g.finish();
}

fn engine_vs_naive(c: &mut Criterion) {
    let p = ConstraintProfile::named("sf-sigma-2n1").unwrap();
    let mut g = c.benchmark_group("engine_vs_naive_n16");
    g.sample_size(10);
    let task = count_task(16, "sf-sigma-2n1", 1);
    g.bench_function("engine", |b| b.iter(|| count_admissible(black_box(&task)).unwrap()));
    g.bench_function("naive", |b| b.iter(|| naive_count(black_box(16), &p).unwrap()));
    g.finish();
}

fn zp_census(c: &mut Criterion) {
    let mut g = c.benchmark_group("census_scsf");
    g.sample_size(10);
    for p in [31, 37] {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| census_scsf(black_box(p), None, 4, DEFAULT_CENSUS_LIMIT).unwrap())
        });
    }
    g.finish();
}

fn special(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_t_special");
    g.sample_size(10);
    for t in [8, 12] {
        g.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| enumerate_t_special(black_box(t), false, u64::MAX).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, counting, engine_vs_naive, zp_census, special);
criterion_main!(benches);

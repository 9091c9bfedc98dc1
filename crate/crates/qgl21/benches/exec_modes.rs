//! Sequential versus rayon execution for the main batch workloads.
//!
//! Build the crate without default features to measure the fallback path
//! that `Exec::Parallel` takes when rayon is not compiled in.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qgl21::realization::verify_fock_relations;
use qgl21::repbuilder::build_rep_with;
use qgl21::structure::is_irreducible_with;
use qgl21::verify::check_all;
use qgl21::{build_rep, Exec, RealizationParams};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_rep");
    g.sample_size(10);
    let p = RealizationParams::from_twice(3, 1, 0);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "2J1=3"), &p, |b, p| {
            b.iter(|| build_rep_with(p, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_fock_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("fock_relations");
    g.sample_size(10);
    let p = RealizationParams::from_twice(1, 2, 0);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "n<=4"), &p, |b, p| {
            b.iter(|| verify_fock_relations(p, 4, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_matrix_checks(c: &mut Criterion) {
    let mut g = c.benchmark_group("matrix_checks");
    g.sample_size(10);
    let rep = build_rep(&RealizationParams::from_twice(2, -1, 0)).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::new(name, "relations"), &rep, |b, r| {
            b.iter(|| check_all(r, exec).unwrap())
        });
        g.bench_with_input(BenchmarkId::new(name, "irreducibility"), &rep, |b, r| {
            b.iter(|| is_irreducible_with(r, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_build, bench_fock_suite, bench_matrix_checks);
criterion_main!(benches);

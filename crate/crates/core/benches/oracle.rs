//! Sequential vs. parallel table construction and verification.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ftdo::generate::gnm_connected;
use ftdo::{verify_instance, BuildOptions, Execution, Oracle, OracleTables, VerifyMode};

fn schedules() -> Vec<(&'static str, Execution)> {
    #[allow(unused_mut)]
    let mut s = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    s.push(("parallel", Execution::Parallel));
    s
}

fn table_build(c: &mut Criterion) {
    let g = gnm_connected(9, 16, 32, 99).unwrap();
    let o = Oracle::build(g.clone(), 3, 7, BuildOptions::default()).unwrap();
    let mut group = c.benchmark_group("table_build");
    group.sample_size(10);
    for d in 1..=3 {
        for (name, exec) in schedules() {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, &d| {
                b.iter(|| black_box(OracleTables::build(&g, o.weights(), o.index(), d, exec, None).unwrap()))
            });
        }
    }
    group.finish();
}

fn verify(c: &mut Criterion) {
    let g = gnm_connected(8, 12, 32, 7).unwrap();
    let o = Oracle::build(g, 2, 1, BuildOptions::default()).unwrap();
    let mut group = c.benchmark_group("verify_exhaustive_d2");
    group.sample_size(10);
    group.bench_function("n8_m12", |b| {
        b.iter(|| black_box(verify_instance(&o, VerifyMode::Exhaustive)))
    });
    group.finish();
}

fn query(c: &mut Criterion) {
    let g = gnm_connected(9, 14, 32, 3).unwrap();
    let o = Oracle::build(g, 2, 1, BuildOptions::default()).unwrap();
    let sets = o.tables().catalog().sets().to_vec();
    c.bench_function("query_all_pairs_d2", |b| {
        b.iter(|| {
            for d in &sets {
                for u in 0..9 {
                    for v in 0..9 {
                        black_box(o.query_set(u, v, d).unwrap());
                    }
                }
            }
        })
    });
}

criterion_group!(benches, table_build, verify, query);
criterion_main!(benches);

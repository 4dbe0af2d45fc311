// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperstab_bench::{state, TWELVE_QUBIT_STATES};
use hyperstab_core::bell::{bell_value, default_steps, lhvt_max_exhaustive, lhvt_max_heuristic, Assignment};
use hyperstab_core::photonic::run_protocol;

fn value(c: &mut Criterion) {
    let mut g = c.benchmark_group("bell_value_12");
    for (label, spec) in TWELVE_QUBIT_STATES {
        let s = state(spec);
        let a = Assignment::all_plus(s.n());
        g.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| bell_value(black_box(&s), &a).unwrap())
        });
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let ghz4 = state("4:0000");
    c.bench_function("lhvt_exhaustive_ghz4", |b| {
        b.iter(|| lhvt_max_exhaustive(black_box(&ghz4), 12, 1).unwrap())
    });
    let s = state(TWELVE_QUBIT_STATES[0].1);
    let mut g = c.benchmark_group("lhvt_heuristic_12");
    g.sample_size(10);
    g.bench_function("restarts_8", |b| {
        b.iter(|| lhvt_max_heuristic(black_box(&s), 0, 8, default_steps(s.n())).unwrap())
    });
    g.finish();
}

fn protocol(c: &mut Criterion) {
    c.bench_function("run_protocol", |b| b.iter(run_protocol));
}

criterion_group!(benches, value, search, protocol);
criterion_main!(benches);

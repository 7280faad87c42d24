use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use misminer::engine::count;
use misminer::{build_model, FreqRare, MisProfile, Propagator, QuerySpec, SearchState};
use misminer_bench::{instance, SIZES};
use num_rational::Ratio;

fn root_propagation(c: &mut Criterion) {
    let mut group = c.benchmark_group("freq_rare_root");
    for &(n, m) in &SIZES {
        let (ds, _) = instance(n, m, 0.5, Ratio::new(1, 10));
        let ones = MisProfile::uniform(ds.n(), 1).unwrap();
        let prop = FreqRare::new(0);
        let mut state = SearchState::new(&ds, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n * m), &(n, m), |b, _| {
            b.iter(|| black_box(prop.propagate(&mut state, &ones)))
        });
    }
    group.finish();
}

fn q0_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("q0_count");
    group.sample_size(10);
    for &(n, m) in &SIZES[..2] {
        let (ds, profile) = instance(n, m, 0.3, Ratio::new(1, 2));
        let model = build_model(&ds, &profile, &QuerySpec::q0()).unwrap();
        group.bench_with_input(
            BenchmarkId::new("minmis", format!("{n}x{m}")),
            &model,
            |b, model| b.iter(|| black_box(count(model))),
        );
    }
    group.finish();
}

criterion_group!(benches, root_propagation, q0_enumeration);
criterion_main!(benches);

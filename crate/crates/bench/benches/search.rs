use bmdl::{build, check_derivation, prove, ProveOutcome, SearchConfig};
use bmdl_bench::{named, random};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn named_sequents(c: &mut Criterion) {
    let mut group = c.benchmark_group("prove");
    for (name, s) in named() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &s, |b, s| {
            b.iter(|| prove(black_box(s), SearchConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn witnesses(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness");
    for (name, s) in named() {
        match prove(&s, SearchConfig::default()).unwrap() {
            ProveOutcome::Accepted { derivation, .. } => {
                group.bench_function(BenchmarkId::new("kernel", name), |b| {
                    b.iter(|| check_derivation(black_box(&derivation), &[]).unwrap())
                });
            }
            ProveOutcome::Rejected(trace) => {
                group.bench_function(BenchmarkId::new("countermodel", name), |b| {
                    b.iter(|| build(black_box(&trace)).unwrap())
                });
            }
        }
    }
    group.finish();
}

fn scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("random");
    group.sample_size(20);
    for size in [5, 10, 15, 20] {
        let batch = random(7, size, 50);
        group.bench_with_input(BenchmarkId::from_parameter(size), &batch, |b, batch| {
            b.iter(|| {
                for s in batch {
                    black_box(prove(s, SearchConfig::default()).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, named_sequents, witnesses, scaling);
criterion_main!(benches);

use std::hint::black_box;

use asch::dynamics::{self, IterativeOptions};
use asch::graph::{gen_gnp, sample_opinions, OpinionDistribution, OpinionInstance};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn instance(n: usize, seed: u64) -> OpinionInstance {
    let g = gen_gnp(n, 8.0 / n as f64, seed).unwrap();
    let s = sample_opinions(n, &OpinionDistribution::default(), seed).unwrap();
    OpinionInstance::uniform(&g, 0.5, s).unwrap()
}

fn equilibrium(c: &mut Criterion) {
    let mut group = c.benchmark_group("equilibrium");
    for n in [200, 1000, 5000] {
        let inst = instance(n, 1);
        group.bench_with_input(BenchmarkId::new("solve", n), &inst, |b, inst| b.iter(|| dynamics::solve(black_box(inst))));
        let opts = IterativeOptions::new(1e-5);
        group.bench_with_input(BenchmarkId::new("iterate", n), &inst, |b, inst| {
            b.iter(|| dynamics::iterate_from_innate(black_box(inst), &opts))
        });
        // Warm start after one resistance change, as in greedy gain evaluation.
        let x = dynamics::solve(&inst).unwrap().opinions;
        let mut changed = inst.clone();
        changed.set_resistance(0, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("warm_iterate", n), &changed, |b, inst| {
            b.iter(|| dynamics::iterate(black_box(inst), &[0], x.clone(), &opts))
        });
    }
    group.finish();
}

criterion_group!(benches, equilibrium);
criterion_main!(benches);

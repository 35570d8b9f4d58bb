use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualsim_bench::equivalence_pair;
use dualsim_core::path::{check_equivalence, Planner, Strategy};
use dualsim_core::BasisState;

fn miter(c: &mut Criterion) {
    let (n, depth) = (8, 24);
    let (g, g2) = equivalence_pair(n, depth);
    let input = BasisState::zeros(n);
    let mut group = c.benchmark_group("miter");
    group.sample_size(20);
    for (name, strategy) in [
        ("seq", Strategy::Sequential),
        ("alt-1", Strategy::Alternating(1)),
        ("greedy-alt", Strategy::GreedyAlt),
        ("plan", Strategy::PlanTranslated(Planner::Greedy)),
    ] {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_equivalence(&g, &g2, &input, strategy).unwrap().equivalent)
        });
    }
    group.finish();
}

criterion_group!(benches, miter);
criterion_main!(benches);

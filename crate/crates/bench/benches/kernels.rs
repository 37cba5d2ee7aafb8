use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use relsmart_core::construct::RowClass;
use relsmart_core::oig::{
    build_one_inclusion_graph, densest_subgraph_flow, full_cube, min_max_fractional_orientation, OigPredictor,
};
use relsmart_core::oracle::{optimal_fixed_error, GameInstance};
use relsmart_core::unitest::{collision_statistic, m_test_unif, PointSet, TesterParams};
use relsmart_core::{DiscreteDistribution, DomainPoint, LabeledExample, Predictor, RandomSource};

fn tester(c: &mut Criterion) {
    let y = PointSet::Row(100);
    let d = y.uniform().unwrap();
    let mut rng = RandomSource::new(1, 0);
    let mut g = c.benchmark_group("tester");
    for size in [10_000usize, 100_000] {
        let s = d.sample_iid(size, &mut rng);
        g.bench_with_input(BenchmarkId::new("collision_statistic", size), &s, |b, s| {
            b.iter(|| collision_statistic(black_box(s)).unwrap())
        });
        let params = TesterParams::new(0.3, 0.2).unwrap();
        g.bench_with_input(BenchmarkId::new("m_test_unif", size), &s, |b, s| {
            b.iter(|| m_test_unif(&y, &params, black_box(s)).unwrap().accepted)
        });
    }
    g.finish();
}

fn orientation(c: &mut Criterion) {
    let mut g = c.benchmark_group("orientation");
    for n in [4usize, 6, 8] {
        let graph = build_one_inclusion_graph(&full_cube(n));
        g.bench_with_input(BenchmarkId::new("min_max_fractional", n), &graph, |b, graph| {
            b.iter(|| min_max_fractional_orientation(black_box(graph)).unwrap().value)
        });
        g.bench_with_input(BenchmarkId::new("densest_flow", n), &graph, |b, graph| {
            b.iter(|| densest_subgraph_flow(black_box(graph)).unwrap())
        });
    }
    g.finish();
}

fn oig_prediction(c: &mut Criterion) {
    let row = RowClass::new(10_000, 100).unwrap();
    let truth = row.canonical(true);
    let mut rng = RandomSource::new(2, 0);
    let t: Vec<_> = row
        .distribution()
        .sample_iid(50, &mut rng)
        .into_iter()
        .map(|x| LabeledExample::new(x, truth.label(&x).unwrap()))
        .collect();
    let x = DomainPoint::row(10_000, 5_000).unwrap();
    c.bench_function("oig_predict_row_m50", |b| {
        b.iter(|| OigPredictor::new(Arc::new(row.clone()), black_box(&t), 4096).unwrap().prob_one(&x).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let domain: Vec<_> = (0..3).map(DomainPoint::flat).collect();
    let class: Vec<Vec<bool>> = (0..8u32).filter(|v| v.count_ones() != 2).map(|v| (0..3).map(|i| v >> i & 1 == 1).collect()).collect();
    let d = DiscreteDistribution::uniform(domain.clone()).unwrap();
    let mut g = c.benchmark_group("oracle");
    for m in [1usize, 2, 3] {
        let game = GameInstance::new(domain.clone(), class.clone(), d.clone(), m).unwrap();
        g.bench_with_input(BenchmarkId::new("optimal_fixed_error", m), &game, |b, game| {
            b.iter(|| optimal_fixed_error(black_box(game)).unwrap().value)
        });
    }
    g.finish();
}

criterion_group!(benches, tester, orientation, oig_prediction, oracle);
criterion_main!(benches);

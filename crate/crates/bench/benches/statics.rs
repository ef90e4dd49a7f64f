use criterion::{criterion_group, criterion_main, Criterion};
use riskgraph::classify::{Mlp, LOCALISER_SIZES};
use riskgraph::faulttree::HealthState;
use riskgraph::truss::{solve_statics, Assembly, LoadCase};
use riskgraph_bench::{calibrated_truss, strain_batch};
use std::hint::black_box;

fn statics(c: &mut Criterion) {
    let (truss, w_max) = calibrated_truss();
    let load = LoadCase::new(truss.load_points[0], 0.5 * w_max);
    c.bench_function("assemble and solve", |b| {
        b.iter(|| solve_statics(black_box(&truss), HealthState::single(3), &load).unwrap())
    });
    let assembly = Assembly::new(&truss, HealthState::UNDAMAGED).unwrap();
    c.bench_function("solve with factorised stiffness", |b| b.iter(|| assembly.solve(black_box(&load)).unwrap()));

    let batch = strain_batch(&truss, 20.0);
    let labels: Vec<usize> = (0..batch.len()).map(|i| i % 8 + 1).collect();
    let mut net = Mlp::new(&LOCALISER_SIZES, 0).unwrap();
    net.standardize_from(&batch).unwrap();
    c.bench_function("localiser loss and gradient", |b| {
        b.iter(|| net.loss_and_gradient(black_box(&batch), &labels).unwrap())
    });
}

criterion_group!(benches, statics);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};
use riskgraph::transition::{build_transition, calibrate_wmax, LoadGrid, DEFAULT_TARGET};
use riskgraph::truss::build_four_bay_truss;
use riskgraph_bench::calibrated_truss;

fn transition(c: &mut Criterion) {
    let (truss, w_max) = calibrated_truss();
    let grid = LoadGrid::new(w_max);
    let mut group = c.benchmark_group("transition");
    group.sample_size(10);
    group.bench_function("build 256x256", |b| b.iter(|| build_transition(&truss, &grid).unwrap()));
    group.bench_function("calibrate w_max", |b| {
        let t = build_four_bay_truss();
        b.iter(|| calibrate_wmax(&t, DEFAULT_TARGET).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transition);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kpzlab::brownian::{blp_sample, BlpScheme, DriftedEnsembleSpec};
use kpzlab::par::{map_replicas_par, map_replicas_seq};
use kpzlab::polymer::oy_free_energy;
use kpzlab::uc::Grid;

fn blp_top(c: &mut Criterion) {
    let spec = DriftedEnsembleSpec::pointed(3, 0.0, 0.0, vec![0.0, 1.0, 2.0]).unwrap();
    let grid = Grid::spanning(0.0, 1.0, 1e-3).unwrap();
    let work = |s: u64, _: &mut _| blp_sample(&spec, grid, s, BlpScheme::Bridge).unwrap().value(grid.len() - 1);
    let mut g = c.benchmark_group("blp_top_3_lines");
    for count in [64usize, 512] {
        g.bench_with_input(BenchmarkId::new("seq", count), &count, |b, &m| b.iter(|| black_box(map_replicas_seq(1, m, work))));
        g.bench_with_input(BenchmarkId::new("par", count), &count, |b, &m| b.iter(|| black_box(map_replicas_par(1, m, work))));
    }
    g.finish();
}

fn oy_lines(c: &mut Criterion) {
    let grid = Grid::with_len(0.0, 0.02, 201).unwrap();
    let work = |s: u64, _: &mut _| oy_free_energy(8, 0.0, grid, &[], s).unwrap().value(grid.len() - 1);
    let mut g = c.benchmark_group("oy_8_lines");
    g.bench_function("seq", |b| b.iter(|| black_box(map_replicas_seq(1, 128, work))));
    g.bench_function("par", |b| b.iter(|| black_box(map_replicas_par(1, 128, work))));
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = blp_top, oy_lines
}
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use frogwalk::analytics::{first_passage_left, Direction, StepLaw};
use frogwalk::classify;
use frogwalk::criteria::{grid_values, phase_grid, DriftSide};
use frogwalk::oracle::dp_first_passage;
use frogwalk::simulator::scenario;

fn closed_forms(c: &mut Criterion) {
    let law = StepLaw::new(0.95, 0.55).unwrap();
    c.bench_function("first_passage_left", |b| {
        b.iter(|| first_passage_left(black_box(law)))
    });
    c.bench_function("dp_first_passage h=1e4", |b| {
        b.iter(|| dp_first_passage(black_box(law), Direction::Left, 3, 10_000).unwrap())
    });
}

fn classifier(c: &mut Criterion) {
    let spec = scenario("cube-staircase").unwrap();
    c.bench_function("classify cube staircase", |b| {
        b.iter(|| classify(black_box(&spec)).unwrap())
    });
    let grid = grid_values(0.25, 3.0, 0.25).unwrap();
    c.bench_function("phase grid 12x12", |b| {
        b.iter(|| phase_grid(black_box(&grid), &grid, DriftSide::Left).unwrap())
    });
}

criterion_group!(benches, closed_forms, classifier);
criterion_main!(benches);

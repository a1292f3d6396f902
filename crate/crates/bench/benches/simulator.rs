use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use frogwalk::simulator::{
    coupled_frog_firework, generation_chain_diagnostic, scenario, SimConfig, Simulator,
};

fn trials(c: &mut Criterion) {
    let right = scenario("homogeneous-right").unwrap();
    let sim = Simulator::new(&right, &SimConfig::new(60, 10_000, 1, 1)).unwrap();
    let mut t = 0;
    c.bench_function("frog trial l=0.45 H=60", |b| {
        b.iter(|| {
            t += 1;
            sim.run(black_box(t))
        })
    });

    let mortal = scenario("mortal-symmetric").unwrap();
    let sim = Simulator::new(&mortal, &SimConfig::new(1_000, 200, 1, 1)).unwrap();
    c.bench_function("frog trial p=0.9", |b| {
        b.iter(|| {
            t += 1;
            sim.run(black_box(t))
        })
    });
}

fn coupling(c: &mut Criterion) {
    let spec = scenario("cube-staircase").unwrap();
    let mut cfg = SimConfig::new(300, 2_000, 1, 0);
    cfg.walker_step_cap = Some(2_000);
    let mut seed = 0;
    c.bench_function("coupled trial cube staircase H=300", |b| {
        b.iter(|| {
            seed += 1;
            coupled_frog_firework(&spec, &cfg, black_box(seed)).unwrap()
        })
    });
    let left = scenario("homogeneous-left").unwrap();
    let cfg = SimConfig::new(100_000, 1_000, 100, 3);
    c.bench_function("generation chain l=0.6 x100", |b| {
        b.iter(|| generation_chain_diagnostic(&left, black_box(&cfg), 50).unwrap())
    });
}

criterion_group!(benches, trials, coupling);
criterion_main!(benches);

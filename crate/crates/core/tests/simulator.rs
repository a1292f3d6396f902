use frogwalk::analytics::{first_passage_right, StepLaw};
use frogwalk::model::{Occupancy, SequenceFamily};
use frogwalk::oracle::enumerate_small_activation;
use frogwalk::simulator::{
    coupled_activation_times, coupled_frog_firework, generation_chain_diagnostic,
    run_firework_trial, run_replications, scenario, Position, SimConfig, Simulator,
};
use frogwalk::ModelSpec;
use proptest::prelude::*;

fn spec(l: f64, p: f64) -> ModelSpec {
    ModelSpec::new(
        SequenceFamily::constant(l),
        SequenceFamily::constant(p),
        Occupancy::All,
    )
    .unwrap()
}

fn within(observed: f64, expected: f64, trials: u64, sigmas: f64) -> bool {
    let se = (expected * (1.0 - expected) / trials as f64).sqrt();
    (observed - expected).abs() <= sigmas * se
}

#[test]
fn second_activation_matches_right_passage() {
    // walker 0 reaches site 1 with probability 3/7, and nothing else can
    let s = spec(0.7, 1.0);
    let cfg = SimConfig::new(1_000, 1_000, 100_000, 21);
    let recs = run_replications(&s, &cfg).unwrap();
    let hits = recs.iter().filter(|r| r.activated_count >= 2).count() as f64;
    let rho = first_passage_right(StepLaw::new(1.0, 0.7).unwrap());
    assert!((rho - 3.0 / 7.0).abs() < 1e-15);
    assert!(
        within(hits / 1e5, 3.0 / 7.0, 100_000, 3.0),
        "{}",
        hits / 1e5
    );
}

#[test]
fn right_drift_origin_always_moves_on() {
    let s = ModelSpec::immortal(SequenceFamily::table(
        vec![0.3],
        Some(SequenceFamily::constant(0.6)),
    ))
    .unwrap();
    let cfg = SimConfig::new(50, 2_000, 2_000, 5);
    let recs = run_replications(&s, &cfg).unwrap();
    let frac = recs.iter().filter(|r| r.activated_count >= 2).count() as f64 / 2_000.0;
    assert!(frac > 0.999, "{frac}");
}

#[test]
fn half_lifetime_always_dies() {
    let s = spec(0.5, 0.5);
    let cfg = SimConfig::new(500, 1_000, 5_000, 8);
    for r in run_replications(&s, &cfg).unwrap() {
        assert!(r.all_dead_time.is_some());
        assert!(!r.hit_time_horizon);
    }
}

#[test]
fn enumeration_agrees_with_simulation() {
    let s = ModelSpec::new(
        SequenceFamily::constant(0.4),
        SequenceFamily::constant(0.8),
        Occupancy::List {
            sites: vec![0, 1, 2],
        },
    )
    .unwrap();
    let exact = enumerate_small_activation(&s, 8).unwrap();
    // horizon wide enough that no walker is removed within 8 ticks
    let cfg = SimConfig::new(10, 8, 50_000, 3);
    let recs = run_replications(&s, &cfg).unwrap();
    for (set, w) in &exact.activation {
        let n = recs
            .iter()
            .filter(|r| {
                r.activated_count as usize == set.len()
                    && r.rightmost_activated == *set.last().unwrap()
            })
            .count();
        assert!(
            within(n as f64 / 5e4, *w, 50_000, 4.0),
            "{set:?}: {} vs {w}",
            n as f64 / 5e4
        );
    }
    for k in 1..exact.visits_at_least.len() {
        let n = recs.iter().filter(|r| r.origin_visits >= k as u64).count();
        let w = exact.visits_at_least[k];
        assert!(within(n as f64 / 5e4, w, 50_000, 4.0), "visits ≥ {k}");
    }
}

#[test]
fn firework_single_site_and_radius_law() {
    let single = ModelSpec::new(
        SequenceFamily::constant(0.3),
        SequenceFamily::constant(1.0),
        Occupancy::List { sites: vec![0] },
    )
    .unwrap();
    let cfg = SimConfig::new(10, 100, 1, 0);
    let t = run_firework_trial(&single, &cfg, 3).unwrap();
    assert_eq!(t.activated_count, 1);
    let out = coupled_frog_firework(&single, &cfg, 3).unwrap();
    assert_eq!(out.frog, vec![0]);
    assert_eq!(out.firework, vec![0]);

    // only walker 0 can start things: activated ≥ 2 iff R_0 ≥ 1
    let s = spec(0.6, 1.0);
    let n = 100_000;
    let hits = (0..n)
        .filter(|&seed| run_firework_trial(&s, &cfg, seed).unwrap().activated_count >= 2)
        .count();
    assert!(within(hits as f64 / n as f64, 2.0 / 3.0, n, 3.0));
}

#[test]
fn staircase_coupling_trial_by_trial() {
    let s = scenario("cube-staircase").unwrap();
    let mut cfg = SimConfig::new(500, 2_000, 1, 0);
    cfg.walker_step_cap = Some(500);
    for seed in 0..100 {
        let out = coupled_frog_firework(&s, &cfg, seed).unwrap();
        assert_eq!(out.frog, out.firework, "seed {seed}");
    }
}

#[test]
fn generation_chain_examples() {
    let strong = ModelSpec::immortal(SequenceFamily::constant(0.99)).unwrap();
    let mut cfg = SimConfig::new(10_000, 1_000, 10_000, 2);
    cfg.record_trajectory = true;
    let r = generation_chain_diagnostic(&strong, &cfg, 3).unwrap();
    let chains = r.chains.as_ref().unwrap();
    assert!(chains.iter().all(|c| c.steps[0].generation_size == 1));
    let quick = chains
        .iter()
        .filter(|c| c.absorbed_at.is_some_and(|g| g <= 3))
        .count();
    assert!(quick as f64 / 1e4 > 0.99);
}

fn states_consistent(l: f64, p: f64, seed: u64) -> Result<(), TestCaseError> {
    let mut cfg = SimConfig::new(40, 400, 1, seed);
    cfg.record_trajectory = true;
    let r = Simulator::new(&spec(l, p), &cfg).unwrap().run(0);
    let walkers = r.walkers.as_ref().unwrap();
    prop_assert!(r.rightmost_activated <= 40);
    prop_assert_eq!(
        walkers
            .iter()
            .filter(|w| w.activation_time.is_some())
            .count() as u64,
        r.activated_count
    );
    for w in walkers {
        match w.activation_time {
            None => prop_assert_eq!(w.position, Position::At(w.site_index as i64)),
            Some(t) => prop_assert!(w.steps_taken <= 400 - t.min(400)),
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn deterministic(l in 0.05f64..0.95, p in 0.5f64..1.0, seed in any::<u64>()) {
        prop_assume!(!(l == 0.5 && p == 1.0));
        let s = spec(l, p);
        let cfg = SimConfig::new(30, 300, 4, seed);
        prop_assert_eq!(run_replications(&s, &cfg).unwrap(), run_replications(&s, &cfg).unwrap());
    }

    #[test]
    fn conservation(l in 0.05f64..0.95, p in 0.5f64..0.999, seed in any::<u64>()) {
        states_consistent(l, p, seed)?;
    }

    #[test]
    fn activation_monotone_in_lifetime(l in 0.1f64..0.9, p in 0.3f64..0.95, bump in 0.0f64..0.05, seed in any::<u64>()) {
        let cfg = SimConfig::new(30, 300, 1, 0);
        let (a, b) = coupled_activation_times(&spec(l, p), &spec(l, p + bump), &cfg, seed).unwrap();
        for (lo, hi) in a.iter().zip(&b) {
            if let Some(t) = lo {
                prop_assert!(matches!(hi, Some(u) if u <= t));
            }
        }
    }

    #[test]
    fn coupling_holds(l in 0.3f64..0.9, p in 0.8f64..=1.0, seed in any::<u64>()) {
        prop_assume!(!(l == 0.5 && p == 1.0));
        let mut cfg = SimConfig::new(40, 300, 1, 0);
        cfg.walker_step_cap = Some(300);
        let out = coupled_frog_firework(&spec(l, p), &cfg, seed).unwrap();
        prop_assert_eq!(out.frog, out.firework);
    }
}

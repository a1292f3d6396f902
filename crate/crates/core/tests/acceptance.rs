//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p frogwalk --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use frogwalk::analytics::{
    absorption_product, classify_sumexp, first_passage, first_passage_left, first_passage_right,
    product_positive, Direction, ProductSequence, SeriesStatus, StepLaw, SumexpSequence,
};
use frogwalk::asymptotic::{Expansion, Scale, Term};
use frogwalk::criteria::{classify_mixed_immortal, grid_values, phase_grid, DriftSide};
use frogwalk::model::{Boundaries, SequenceFamily, Side};
use frogwalk::oracle::dp_first_passage;
use frogwalk::simulator::{
    coupled_frog_firework, generation_chain_diagnostic, per_site_origin_frequency,
    run_replications, scenario, SimConfig,
};
use frogwalk::{classify, LocalStatus, ModelSpec, Rule};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn closed_form_vs_dp() -> Outcome {
    let start = Instant::now();
    let mut worst_mortal: f64 = 0.0;
    let mut worst_ruin: f64 = 0.0;
    let mut bad = Vec::new();
    for p in [0.5, 0.8, 0.95, 1.0] {
        for l in [0.2, 0.45, 0.5, 0.55, 0.8] {
            let law = StepLaw::new(p, l).map_err(|e| e.to_string())?;
            for dir in [Direction::Left, Direction::Right] {
                for d in [1u64, 3] {
                    let exact = first_passage(law, dir).powi(d as i32);
                    let dp = dp_first_passage(law, dir, d, 10_000).map_err(|e| e.to_string())?;
                    let err = (exact - dp).abs();
                    if p < 1.0 {
                        worst_mortal = worst_mortal.max(err);
                        if err > 1e-6 {
                            bad.push(format!("p={p} l={l} {dir:?} d={d}: {err:.2e}"));
                        }
                    } else if (l - 0.5f64).abs() >= 0.05 {
                        worst_ruin = worst_ruin.max(err);
                        if err > 1e-3 {
                            bad.push(format!("p=1 l={l} {dir:?} d={d}: {err:.2e}"));
                        }
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        bad.is_empty() && secs < 10.0,
        format!(
            "max error {worst_mortal:.1e} (p < 1), {worst_ruin:.1e} (p = 1), {secs:.2}s {bad:?}"
        ),
    )
}

fn gamblers_ruin() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let l = (i as f64 + 0.5) / 1000.0;
        let law = StepLaw::new(1.0, l).map_err(|e| e.to_string())?;
        worst = worst
            .max((first_passage_left(law) - (l / (1.0 - l)).min(1.0)).abs())
            .max((first_passage_right(law) - ((1.0 - l) / l).min(1.0)).abs());
    }
    check(
        worst <= 1e-14,
        format!("1000 values of l, max error {worst:.1e}"),
    )
}

fn coupling() -> Outcome {
    let start = Instant::now();
    let left_power = ModelSpec::immortal(SequenceFamily::power_above(1.0, 0.25, 0.75))
        .map_err(|e| e.to_string())?;
    let staircase = scenario("cube-staircase").ok_or("missing scenario")?;
    let mut cfg = SimConfig::new(300, 2_000, 1, 0);
    cfg.walker_step_cap = Some(2_000);
    let mut mismatched = Vec::new();
    let mut censored = 0;
    for (label, spec) in [("power law", &left_power), ("cube staircase", &staircase)] {
        for seed in 0..1_000u64 {
            let out = coupled_frog_firework(spec, &cfg, seed).map_err(|e| e.to_string())?;
            censored += out.censored as u32;
            if !out.agree() {
                mismatched.push(format!("{label} seed {seed}"));
            }
        }
    }
    check(
        mismatched.is_empty(),
        format!(
            "2000 trials, {} mismatches, {censored} with a capped walker, {:.1}s {mismatched:?}",
            mismatched.len(),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn origin_marginals() -> Outcome {
    let start = Instant::now();
    let spec = ModelSpec::immortal(SequenceFamily::constant(0.45)).map_err(|e| e.to_string())?;
    // a walker past site 60 returns with probability (9/11)^60 < 1e-5
    let cfg = SimConfig::new(60, 10_000, 100_000, 4);
    let freqs = per_site_origin_frequency(&spec, &cfg, 8).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for f in freqs.iter().filter(|f| f.site >= 1) {
        let z = (f.frequency - (9.0f64 / 11.0).powi(f.site as i32)) / f.std_error;
        worst = worst.max(z.abs());
        ok &= z.abs() <= 3.0;
    }
    check(
        ok && freqs.len() >= 8,
        format!(
            "sites 1..8, worst |z| = {worst:.2}, {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn phase_diagram() -> Outcome {
    let grid = grid_values(0.25, 3.0, 0.25).map_err(|e| e.to_string())?;
    let mut mismatches = Vec::new();
    let mut boundary = 0;
    for side in [DriftSide::Left, DriftSide::Right] {
        let rows = phase_grid(&grid, &grid, side).map_err(|e| e.to_string())?;
        if rows.len() != 144 {
            return Err(format!("{side}: {} points", rows.len()));
        }
        for row in &rows {
            let (a, b) = (row.point.alpha, row.point.beta);
            let survives = match side {
                DriftSide::Left => b >= 2f64.min(1.0 + a),
                DriftSide::Right => b >= 2.0 && a >= 1.0,
            };
            let want = if survives {
                LocalStatus::SurvivesWP
            } else {
                LocalStatus::Dies
            };
            if b == 2f64.min(1.0 + a) {
                boundary += 1;
            }
            if row.verdict.local != want {
                mismatches.push(format!("{side} ({a}, {b}): {:?}", row.verdict.local));
            }
        }
        let corner = rows
            .iter()
            .any(|r| r.point.alpha == 1.0 && r.point.beta == 2.0);
        if !corner {
            return Err(format!("{side}: (1, 2) missing"));
        }
    }
    check(
        mismatches.is_empty(),
        format!(
            "288 points, {boundary} on the boundary, {} mismatches {mismatches:?}",
            mismatches.len()
        ),
    )
}

fn classifier_examples() -> Outcome {
    let mut bad = Vec::new();
    let mut expect =
        |label: &str, spec: ModelSpec, local: LocalStatus, rules: &[Rule]| match classify(&spec) {
            Ok(v) if v.local == local && rules.iter().all(|r| v.cites(*r)) => {}
            Ok(v) => bad.push(format!("{label}: {:?} {:?}", v.local, v.citations)),
            Err(e) => bad.push(format!("{label}: {e}")),
        };
    let immortal = |f| ModelSpec::immortal(f).expect("valid family");
    expect(
        "right power law, alpha 2",
        immortal(SequenceFamily::power_below(2.0, 0.25, 0.4)),
        LocalStatus::SurvivesAS,
        &[Rule::RightPowerLaw],
    );
    expect(
        "right power law, alpha 0.5",
        immortal(SequenceFamily::power_below(0.5, 0.25, 0.4)),
        LocalStatus::Dies,
        &[Rule::RightPowerLaw],
    );
    expect(
        "left power law, alpha 1",
        immortal(SequenceFamily::power_above(1.0, 0.25, 0.75)),
        LocalStatus::SurvivesWP,
        &[Rule::LeftPowerLaw, Rule::BlockTest],
    );
    expect(
        "cube staircase",
        scenario("cube-staircase").expect("scenario"),
        LocalStatus::SurvivesWP,
        &[Rule::CubeStaircase],
    );
    expect(
        "slow staircase",
        immortal(SequenceFamily::Staircase {
            side: Side::Above,
            alpha: 1.0,
            scale: 0.4,
            boundaries: Boundaries::Exponential { base: 2 },
            at_zero: 0.9,
        }),
        LocalStatus::Inconclusive,
        &[],
    );
    let mixed = immortal(SequenceFamily::table(
        vec![0.7, 0.4],
        Some(SequenceFamily::constant(0.7)),
    ));
    match classify_mixed_immortal(&mixed) {
        Ok(v) if v.local == LocalStatus::SurvivesWP && v.cites(Rule::MixedDrift) => {}
        Ok(v) => bad.push(format!("mixed drift: {:?} {:?}", v.local, v.citations)),
        Err(e) => bad.push(format!("mixed drift: {e}")),
    }
    check(bad.is_empty(), format!("6 examples {bad:?}"))
}

fn extinction() -> Outcome {
    let mortal = scenario("mortal-symmetric").ok_or("missing scenario")?;
    let cfg = SimConfig::new(1_000, 200, 10_000, 7);
    let records = run_replications(&mortal, &cfg).map_err(|e| e.to_string())?;
    let alive = records
        .iter()
        .filter(|r| r.hit_time_horizon || r.hit_site_horizon)
        .count() as f64
        / records.len() as f64;

    let left = ModelSpec::immortal(SequenceFamily::constant(0.6)).map_err(|e| e.to_string())?;
    let cfg = SimConfig::new(100_000, 1_000, 10_000, 8);
    let chain = generation_chain_diagnostic(&left, &cfg, 50).map_err(|e| e.to_string())?;
    let (bound, tail) = absorption_product(2.0 / 3.0, 1e-10).map_err(|e| e.to_string())?;
    let reported = chain.absorption_bound.unwrap_or(f64::NAN);
    let absorbed = chain.absorbed as f64 / chain.trials as f64;
    let se = (absorbed * (1.0 - absorbed) / chain.trials as f64).sqrt();
    check(
        alive < 1e-2
            && chain.late_activation_fraction < 1e-2
            && bound > 0.0
            && (bound - reported).abs() <= 1e-10
            && absorbed >= bound - 3.0 * se,
        format!(
            "alive at 200: {alive:.4}; late activations: {:.4}; bound {bound:.10} (tail {tail:.0e}), absorbed {absorbed:.4}",
            chain.late_activation_fraction
        ),
    )
}

fn sumexp(terms: Vec<Term>) -> SeriesStatus {
    classify_sumexp(&SumexpSequence::symbolic(Expansion::exact(terms)))
        .map(|v| v.status)
        .unwrap_or(SeriesStatus::Inconclusive)
}

// log of ∏_{i ≤ n} (1 − α_i)^{k_i} with compensated summation
fn log_partial_product(c: f64, s: f64, k: f64, t: f64, n: u64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for i in 1..=n {
        let x = i as f64;
        let term = (k * x.powf(t)).floor() * (-c * x.powf(-s)).ln_1p() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    sum
}

fn lemma_suite() -> Outcome {
    let bounded = sumexp(vec![Term::new(3.0, Scale::power(-1.0))]);
    let log_over_n = sumexp(vec![Term::new(1.0, Scale::new(-1.0, 1.0, 0.0))]);
    let shifted = sumexp(vec![
        Term::new(1.0, Scale::new(-1.0, 1.0, 0.0)),
        Term::new(2.0, Scale::new(-1.0, 0.0, 1.0)),
    ]);
    let families_ok = bounded == SeriesStatus::Diverges
        && log_over_n == SeriesStatus::Diverges
        && shifted == SeriesStatus::Converges;

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let mut disagreements = Vec::new();
    for case in 0..20 {
        // k_i α_i ~ n^{-e}, e well away from 1 on either side
        let convergent = case % 2 == 0;
        let e = if convergent {
            rng.random_range(1.5..3.0)
        } else {
            rng.random_range(0.3..0.8)
        };
        let t = rng.random_range(0.0..0.5);
        let c = rng.random_range(0.1..0.5);
        let k = rng.random_range(1..=3) as f64;
        let seq = ProductSequence {
            alpha_prefix: Vec::new(),
            k_prefix: Vec::new(),
            alpha_tail: Expansion::monomial(c, Scale::power(-(e + t))),
            k_tail: Expansion::monomial(k, Scale::power(t)),
        };
        let verdict = product_positive(&seq).map_err(|err| err.to_string())?;
        let early = log_partial_product(c, e + t, k, t, 10_000);
        let late = log_partial_product(c, e + t, k, t, 100_000);
        // a convergent product has settled by 10^4 factors; a divergent one keeps falling
        let settled = early - late < 0.5;
        if verdict.positive != settled || verdict.positive != convergent {
            disagreements.push(format!(
                "e={e:.2} t={t:.2}: {} vs drop {:.3}",
                verdict.positive,
                early - late
            ));
        }
    }
    check(
        families_ok && disagreements.is_empty(),
        format!("sumexp {bounded:?}/{log_over_n:?}/{shifted:?}; 20 products, {disagreements:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed forms match the truncated DP", closed_form_vs_dp),
        ("gambler's ruin reductions", gamblers_ruin),
        ("frog and firework activation sets coincide", coupling),
        ("origin-visit marginals", origin_marginals),
        ("phase diagram", phase_diagram),
        ("classifier on the worked examples", classifier_examples),
        ("extinction diagnostics", extinction),
        ("series and product lemmas", lemma_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use frogwalk::criteria::{
    classify_mixed_immortal, grid_values, phase_power_law, power_law_spec, DriftSide, PhasePoint,
};
use frogwalk::model::{Occupancy, SequenceFamily};
use frogwalk::{classify, GlobalStatus, LocalStatus, ModelSpec, Rule};
use proptest::prelude::*;

fn phase_local(alpha: f64, beta: f64, side: DriftSide) -> LocalStatus {
    let survives = match side {
        DriftSide::Left => beta >= 2f64.min(1.0 + alpha),
        DriftSide::Right => beta >= 2.0 && alpha >= 1.0,
    };
    if survives {
        LocalStatus::SurvivesWP
    } else {
        LocalStatus::Dies
    }
}

// The mortal classifier knows nothing about power laws; on power-law models it
// has to land on the same phase map.
#[test]
fn generic_classifier_reproduces_phase_map() {
    let grid = grid_values(0.25, 3.0, 0.25).unwrap();
    let mut mismatches = Vec::new();
    for side in [DriftSide::Left, DriftSide::Right] {
        for &alpha in &grid {
            for &beta in &grid {
                let pt = PhasePoint {
                    alpha,
                    beta,
                    drift_side: side,
                };
                let spec = power_law_spec(pt, 0.25).unwrap();
                let v = classify(&spec).unwrap();
                if v.local != phase_local(alpha, beta, side) {
                    mismatches.push((side, alpha, beta, v.local));
                }
                assert_eq!(v.global, GlobalStatus::Survives, "{side} {alpha} {beta}");
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:?}");
}

#[test]
fn immortal_column_matches_power_law_examples() {
    for alpha in [0.25, 0.5, 0.75, 1.0, 2.0, 3.0] {
        let right = PhasePoint {
            alpha,
            beta: f64::INFINITY,
            drift_side: DriftSide::Right,
        };
        let generic = classify(&power_law_spec(right, 0.25).unwrap()).unwrap();
        assert_eq!(
            generic.local,
            phase_power_law(right).unwrap().local,
            "alpha {alpha}"
        );
        let left = PhasePoint {
            drift_side: DriftSide::Left,
            ..right
        };
        let generic = classify(&power_law_spec(left, 0.25).unwrap()).unwrap();
        assert_eq!(generic.local, LocalStatus::SurvivesWP);
        assert!(generic.cites(Rule::LeftPowerLaw));
    }
}

#[test]
fn mixed_drift_examples() {
    let one_right = ModelSpec::immortal(SequenceFamily::table(
        vec![0.7, 0.4],
        Some(SequenceFamily::constant(0.7)),
    ))
    .unwrap();
    let v = classify_mixed_immortal(&one_right).unwrap();
    assert_eq!(v.local, LocalStatus::SurvivesWP);
    assert!(v.cites(Rule::MixedDrift));

    let left_origin = ModelSpec::immortal(SequenceFamily::table(
        vec![0.6],
        Some(SequenceFamily::constant(0.45)),
    ))
    .unwrap();
    assert_eq!(classify(&left_origin).unwrap().local, LocalStatus::Dies);

    // l_n = 1/2 − 1/n² from n = 2 on, except l_0 = 0.6 and l_3 = 0.8
    let critical = ModelSpec::immortal(SequenceFamily::table(
        vec![0.6, 0.3, 0.25, 0.8],
        Some(SequenceFamily::power_below(2.0, 1.0, 0.3)),
    ))
    .unwrap();
    let v = classify(&critical).unwrap();
    assert_eq!(v.local, LocalStatus::SurvivesWP);
    assert!(v.cites(Rule::MixedDrift));
}

#[test]
fn black_box_table_is_inconclusive() {
    let spec = ModelSpec::new(
        SequenceFamily::table(vec![0.4, 0.45, 0.3], None),
        SequenceFamily::constant(1.0),
        Occupancy::All,
    )
    .unwrap();
    let v = classify(&spec).unwrap();
    assert_eq!(v.local, LocalStatus::Inconclusive);
    assert!(!v.is_decisive());
}

fn point() -> impl Strategy<Value = PhasePoint> {
    (0.05f64..4.0, 0.05f64..4.0, any::<bool>()).prop_map(|(alpha, beta, left)| PhasePoint {
        alpha,
        beta,
        drift_side: if left {
            DriftSide::Left
        } else {
            DriftSide::Right
        },
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // local survival implies global survival and positive activation
    #[test]
    fn verdict_consistency(pt in point()) {
        let v = classify(&power_law_spec(pt, 0.25).unwrap()).unwrap();
        if v.local.survives() {
            prop_assert!(v.global.survives());
            prop_assert!(v.infinite_activation.survives());
        }
        if v.global == GlobalStatus::Dies {
            prop_assert!(!v.local.survives());
        }
        prop_assert!(v.local == LocalStatus::Inconclusive || !v.citations.is_empty());
    }

    // longer lives never turn survival into extinction
    #[test]
    fn monotone_in_lifetime_exponent(pt in point(), bump in 0.0f64..2.0) {
        let lo = phase_power_law(pt).unwrap();
        let hi = phase_power_law(PhasePoint { beta: pt.beta + bump, ..pt }).unwrap();
        if lo.local.survives() {
            prop_assert!(hi.local.survives());
        }
    }

    // the two drift sides: left-drift survival region contains the right-drift one
    #[test]
    fn left_region_contains_right_region(alpha in 0.05f64..4.0, beta in 0.05f64..4.0) {
        let r = phase_power_law(PhasePoint { alpha, beta, drift_side: DriftSide::Right }).unwrap();
        let l = phase_power_law(PhasePoint { alpha, beta, drift_side: DriftSide::Left }).unwrap();
        if r.local.survives() {
            prop_assert!(l.local.survives());
        }
    }
}

//! Named models used by the CLI and the test suites.

use crate::model::{Boundaries, ModelSpec, Occupancy, SequenceFamily, Side};

pub const SCENARIOS: &[(&str, &str)] = &[
    ("homogeneous-right", "immortal, l = 0.45"),
    ("homogeneous-left", "immortal, l = 0.6"),
    ("mortal-symmetric", "p = 0.9, l = 0.5"),
    ("critical-right", "immortal, l_n = 1/2 − 0.25/n"),
    ("power-left", "immortal, l_n = 1/2 + 0.25/√n"),
    (
        "cube-staircase",
        "immortal, l = 1/2 + 0.4/j² on [j³, (j+1)³)",
    ),
    (
        "slow-staircase",
        "immortal, l = 1/2 + 0.4/j on [2^(j−1), 2^j)",
    ),
];

fn staircase(boundaries: Boundaries, alpha: f64) -> SequenceFamily {
    SequenceFamily::Staircase {
        side: Side::Above,
        alpha,
        scale: 0.4,
        boundaries,
        at_zero: 0.9,
    }
}

/// The scenario called `name`.
pub fn scenario(name: &str) -> Option<ModelSpec> {
    let drift = match name {
        "homogeneous-right" => SequenceFamily::constant(0.45),
        "homogeneous-left" => SequenceFamily::constant(0.6),
        "mortal-symmetric" => {
            return ModelSpec::new(
                SequenceFamily::constant(0.5),
                SequenceFamily::constant(0.9),
                Occupancy::All,
            )
            .ok()
            .map(|s| s.with_name(name));
        }
        "critical-right" => SequenceFamily::power_below(1.0, 0.25, 0.4),
        "power-left" => SequenceFamily::power_above(0.5, 0.25, 0.6),
        "cube-staircase" => staircase(Boundaries::Power { exponent: 3 }, 2.0),
        "slow-staircase" => staircase(Boundaries::Exponential { base: 2 }, 1.0),
        _ => return None,
    };
    ModelSpec::immortal(drift).ok().map(|s| s.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_builds() {
        for (name, _) in SCENARIOS {
            assert!(scenario(name).is_some(), "{name}");
        }
        assert!(scenario("nope").is_none());
    }
}

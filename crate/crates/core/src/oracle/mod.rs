//! Brute-force ground truth: finite-horizon dynamic programming for single
//! walkers and exhaustive enumeration of tiny frog systems.

mod checks;
mod enumerate;

use thiserror::Error;

use crate::analytics::{Direction, StepLaw};
use crate::model::ModelError;

pub use checks::{
    run_oracle_checks, CheckCase, CheckOptions, CheckReport, Fault, GRID_DISTANCE, GRID_L, GRID_P,
};
pub use enumerate::{
    enumerate_exact, enumerate_float, enumerate_small_activation, Enumeration, EnumerationReport,
    Weight,
};

/// Largest DP window accepted.
const MAX_WINDOW: u64 = 50_000_000;
/// Probability mass treated as zero at the edge of the DP window.
const CELL_FLOOR: f64 = 1e-40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Probability that a walker started at 0 hits `±distance` within `horizon`
/// steps. Positions left of `−horizon` are unreachable, so the window
/// `[−horizon, distance)` is exact. Cells below `1e-40` at the edges of the
/// occupied range are dropped and the run stops once the live mass is below
/// that floor, so the result is within `1e-30` of the exact value.
pub fn dp_first_passage(
    law: StepLaw,
    direction: Direction,
    distance: u64,
    horizon: u64,
) -> Result<f64, OracleError> {
    if distance == 0 {
        return Err(OracleError::Invalid("distance must be at least 1".into()));
    }
    if horizon < distance {
        return Err(OracleError::Invalid(format!(
            "horizon {horizon} shorter than distance {distance}"
        )));
    }
    let width = horizon + distance;
    if width > MAX_WINDOW {
        return Err(OracleError::Resource(format!(
            "window of {width} positions exceeds {MAX_WINDOW}"
        )));
    }
    let law = match direction {
        Direction::Right => law,
        Direction::Left => law.mirrored(),
    };
    let (left, right, _) = law.masses();
    let h = horizon as usize;
    let top = h + distance as usize - 1;
    let mut cur = vec![0.0f64; top + 1];
    let mut next = vec![0.0f64; top + 1];
    cur[h] = 1.0;
    let mut absorbed = 0.0;
    let (mut lo, mut hi) = (h, h);
    let mut dropped = 0.0;
    for t in 1..=h {
        if hi == top {
            absorbed += right * cur[top];
        }
        let nlo = lo.saturating_sub(1);
        let nhi = (hi + 1).min(top);
        for i in nlo..=nhi {
            let from_left = if i > lo && i - 1 <= hi {
                right * cur[i - 1]
            } else {
                0.0
            };
            let from_right = if i + 1 >= lo && i < hi {
                left * cur[i + 1]
            } else {
                0.0
            };
            next[i] = from_left + from_right;
        }
        let (mut a, mut b) = (nlo, nhi);
        while a < b && next[a] < CELL_FLOOR {
            dropped += next[a];
            a += 1;
        }
        while b > a && next[b] < CELL_FLOOR {
            dropped += next[b];
            b -= 1;
        }
        lo = a;
        hi = b;
        std::mem::swap(&mut cur, &mut next);
        if t % 64 == 0 && cur[lo..=hi].iter().sum::<f64>() < CELL_FLOOR {
            break;
        }
    }
    debug_assert!(dropped < 1e-30);
    Ok(absorbed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{first_passage_left, first_passage_right};

    #[test]
    fn small_horizons_by_hand() {
        let law = StepLaw::new(0.5, 0.5).unwrap();
        // hit +1 within 3 steps: R, or L R R
        let v = dp_first_passage(law, Direction::Right, 1, 3).unwrap();
        assert!((v - (0.25 + 0.25f64.powi(3))).abs() < 1e-15);
        let v = dp_first_passage(law, Direction::Right, 2, 2).unwrap();
        assert!((v - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn converges_to_closed_form() {
        let law = StepLaw::new(0.9, 0.5).unwrap();
        let dp = dp_first_passage(law, Direction::Left, 1, 10_000).unwrap();
        assert!((dp - first_passage_left(law)).abs() < 1e-12);
        let law = StepLaw::new(1.0, 0.7).unwrap();
        let dp = dp_first_passage(law, Direction::Right, 1, 10_000).unwrap();
        assert!((dp - first_passage_right(law)).abs() < 1e-9);
    }

    #[test]
    fn input_errors() {
        let law = StepLaw::new(0.5, 0.5).unwrap();
        assert!(dp_first_passage(law, Direction::Right, 0, 5).is_err());
        assert!(dp_first_passage(law, Direction::Right, 6, 5).is_err());
        assert!(matches!(
            dp_first_passage(law, Direction::Right, 1, 1 << 40),
            Err(OracleError::Resource(_))
        ));
    }
}

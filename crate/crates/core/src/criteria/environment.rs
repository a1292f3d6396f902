//! Immortal right-drift walkers in an independent random environment.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{ModelSpec, SequenceFamily};
use crate::rng;

use super::{
    classify_right_drift_immortal, CriteriaError, GlobalStatus, LocalStatus, Rule, Verdict,
};

/// Smallest drift a sampled environment may take.
const FLOOR: f64 = 1e-12;
/// Sites sampled per environment for the empirical heuristic.
const WINDOW_TOP: u64 = 1 << 14;

/// Law of the independent drifts `l_n`, all below 1/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentLaw {
    /// `n(1/2 − l_n)` uniform on `(lower·n^{1−α}, upper·n^{1−α})`.
    UniformBand { lower: f64, upper: f64, alpha: f64 },
    /// With probability `min(1, coeff/n^exponent)` the walker sits at
    /// `l_n = 1/2 − level/n`; otherwise `l_n = far`.
    TwoPoint {
        coeff: f64,
        exponent: f64,
        level: f64,
        far: f64,
    },
    /// A deterministic sequence.
    Degenerate { family: SequenceFamily },
}

impl EnvironmentLaw {
    fn check(&self) -> Result<(), CriteriaError> {
        let bad = |msg: String| Err(CriteriaError::Precondition(msg));
        match *self {
            EnvironmentLaw::UniformBand {
                lower,
                upper,
                alpha,
            } => {
                if !(lower > 0.0 && upper > lower && upper.is_finite() && alpha > 0.0) {
                    return bad(format!(
                        "uniform band needs 0 < lower < upper and alpha > 0, got ({lower}, {upper}, {alpha})"
                    ));
                }
            }
            EnvironmentLaw::TwoPoint {
                coeff,
                exponent,
                level,
                far,
            } => {
                if !(coeff > 0.0 && exponent > 0.0 && level > 0.0 && far > 0.0 && far < 0.5) {
                    return bad(
                        "two-point law needs positive coeff, exponent, level and far in (0, 1/2)"
                            .into(),
                    );
                }
            }
            EnvironmentLaw::Degenerate { .. } => {}
        }
        Ok(())
    }

    /// Draw `l_n`.
    pub fn sample<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> f64 {
        let x = n.max(1) as f64;
        let v = match self {
            EnvironmentLaw::UniformBand {
                lower,
                upper,
                alpha,
            } => {
                let u: f64 = rng.random_range(*lower..*upper);
                0.5 - u * x.powf(-alpha)
            }
            EnvironmentLaw::TwoPoint {
                coeff,
                exponent,
                level,
                far,
            } => {
                let near = (coeff * x.powf(-exponent)).min(1.0);
                if n > 0 && rng.random::<f64>() < near {
                    0.5 - level / x
                } else {
                    *far
                }
            }
            EnvironmentLaw::Degenerate { family } => family.raw(n).map_or(f64::NAN, |r| r.0),
        };
        v.max(FLOOR)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvironmentReport {
    pub verdict: Verdict,
    /// Fraction of sampled environments whose last dyadic window of
    /// `Σ (l_n/(1−l_n))^n` is at least half the previous one. A heuristic
    /// reading of divergence; never used for the verdict.
    pub divergent_fraction: f64,
    pub trials: u64,
    pub window_top: u64,
}

/// Classify for almost every environment, and sample `trials` environments for
/// the empirical heuristic.
pub fn classify_random_environment(
    law: &EnvironmentLaw,
    trials: u64,
    seed: u64,
) -> Result<EnvironmentReport, CriteriaError> {
    law.check()?;
    let mut v = match law {
        EnvironmentLaw::Degenerate { family } => {
            let spec = ModelSpec::immortal(family.clone())?;
            classify_right_drift_immortal(&spec)?
        }
        _ => symbolic(law),
    };
    v.cite(Rule::EnvironmentZeroOne);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| u64::from(looks_divergent(law, seed, t)))
        .sum();
    let divergent_fraction = if trials == 0 {
        f64::NAN
    } else {
        hits as f64 / trials as f64
    };
    v.diag("divergent_fraction", divergent_fraction);
    Ok(EnvironmentReport {
        verdict: v.finish(),
        divergent_fraction,
        trials,
        window_top: WINDOW_TOP,
    })
}

fn symbolic(law: &EnvironmentLaw) -> Verdict {
    let mut v = Verdict::inconclusive();
    v.global = GlobalStatus::Trivial;
    v.infinite_activation = LocalStatus::SurvivesAS;
    v.cite(Rule::ImmortalWalkers);
    match *law {
        // n(1/2 − l_n) ≤ upper·n^{1−α}: bounded when α ≥ 1, and beyond any
        // multiple of ln n when α < 1
        EnvironmentLaw::UniformBand { alpha, .. } => {
            if alpha >= 1.0 {
                v.local = LocalStatus::SurvivesAS;
                v.cite(Rule::EnvironmentBounded);
                v.cite(Rule::EnvironmentBelowLog);
            } else {
                v.local = LocalStatus::Dies;
                v.cite(Rule::EnvironmentAboveLog);
            }
        }
        // P(n(1/2 − l_n) ≤ level) ≥ coeff/n^exponent, and the far value makes
        // n(1/2 − l_n) linear otherwise
        EnvironmentLaw::TwoPoint { exponent, .. } => {
            if exponent <= 1.0 {
                v.local = LocalStatus::SurvivesAS;
                v.cite(Rule::EnvironmentBounded);
            } else {
                v.local = LocalStatus::Dies;
                v.cite(Rule::EnvironmentAboveLog);
            }
        }
        EnvironmentLaw::Degenerate { .. } => unreachable!("handled by the caller"),
    }
    v.diag("scope", "almost every environment");
    v
}

fn looks_divergent(law: &EnvironmentLaw, seed: u64, trial: u64) -> bool {
    let mut rng = rng::stream(seed, trial);
    let half = WINDOW_TOP / 2;
    let quarter = WINDOW_TOP / 4;
    let (mut prev, mut last) = (0.0, 0.0);
    for n in quarter..WINDOW_TOP {
        let l = law.sample(n, &mut rng);
        let term = (n as f64 * (l / (1.0 - l)).ln()).exp();
        if n < half {
            prev += term;
        } else {
            last += term;
        }
    }
    last > 0.0 && last >= 0.5 * prev
}

//! Phase map for power-law drifts and lifetimes:
//! `|l_n − 1/2| ~ n^{-α}` and `1 − p_n ~ n^{-β}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, ModelSpec, Occupancy, SequenceFamily};

use super::{CriteriaError, GlobalStatus, LocalStatus, Rule, Verdict};

/// Schema tag written at the top of phase-grid CSV files.
pub const PHASE_GRID_FORMAT: &str = "frogwalk-phase-grid/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftSide {
    /// `l_n > 1/2`.
    Left,
    /// `l_n < 1/2`.
    Right,
}

impl std::str::FromStr for DriftSide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(DriftSide::Left),
            "right" => Ok(DriftSide::Right),
            _ => Err(format!("unknown drift side {s:?} (expected left or right)")),
        }
    }
}

impl std::fmt::Display for DriftSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DriftSide::Left => "left",
            DriftSide::Right => "right",
        })
    }
}

/// `beta = f64::INFINITY` stands for immortal walkers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub alpha: f64,
    pub beta: f64,
    pub drift_side: DriftSide,
}

/// Verdict at a point of the power-law phase diagram. Boundaries belong to the
/// survival side.
pub fn phase_power_law(pt: PhasePoint) -> Result<Verdict, CriteriaError> {
    if !(pt.alpha.is_finite() && pt.alpha > 0.0) {
        return Err(CriteriaError::InvalidPoint(format!(
            "alpha must be positive and finite, got {}",
            pt.alpha
        )));
    }
    if pt.beta.is_nan() || pt.beta <= 0.0 {
        return Err(CriteriaError::InvalidPoint(format!(
            "beta must be positive or infinite, got {}",
            pt.beta
        )));
    }
    let (alpha, beta) = (pt.alpha, pt.beta);
    let mut v = Verdict::inconclusive();
    if beta.is_infinite() {
        v.global = GlobalStatus::Trivial;
        v.cite(Rule::ImmortalWalkers);
        match pt.drift_side {
            DriftSide::Right => {
                v.local = if alpha >= 1.0 {
                    LocalStatus::SurvivesAS
                } else {
                    LocalStatus::Dies
                };
                v.infinite_activation = LocalStatus::SurvivesAS;
                v.cite(Rule::RightPowerLaw);
            }
            DriftSide::Left => {
                v.local = LocalStatus::SurvivesWP;
                v.infinite_activation = LocalStatus::SurvivesWP;
                v.cite(Rule::LeftPowerLaw);
            }
        }
        return Ok(v.finish());
    }
    v.global = GlobalStatus::Survives;
    v.infinite_activation = LocalStatus::SurvivesWP;
    let survives = match pt.drift_side {
        DriftSide::Left => {
            v.cite(Rule::PhaseLeft);
            beta >= 2f64.min(1.0 + alpha)
        }
        DriftSide::Right => {
            v.cite(Rule::PhaseRight);
            beta >= 2.0 && alpha >= 1.0
        }
    };
    v.local = if survives {
        LocalStatus::SurvivesWP
    } else {
        LocalStatus::Dies
    };
    Ok(v.finish())
}

/// A power-law model at `pt`: `l_n = 1/2 ∓ scale·n^{-α}`,
/// `p_n = 1 − scale·n^{-β}` (immortal when `β = ∞`), every site occupied.
/// Site 0 takes the `n = 1` values.
pub fn power_law_spec(pt: PhasePoint, scale: f64) -> Result<ModelSpec, ModelError> {
    let drift = match pt.drift_side {
        DriftSide::Left => SequenceFamily::power_above(pt.alpha, scale, 0.5 + scale),
        DriftSide::Right => SequenceFamily::power_below(pt.alpha, scale, 0.5 - scale),
    };
    let lifetime = if pt.beta.is_infinite() {
        SequenceFamily::constant(1.0)
    } else {
        SequenceFamily::power_lifetime(pt.beta, scale, 1.0 - scale)
    };
    ModelSpec::new(drift, lifetime, Occupancy::All)
}

/// `start, start + step, …` up to `end` inclusive (within half a step).
pub fn grid_values(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CriteriaError> {
    if !(start.is_finite() && end.is_finite() && step.is_finite() && step > 0.0 && end >= start) {
        return Err(CriteriaError::InvalidPoint(format!(
            "bad range {start}..{end} step {step}"
        )));
    }
    let count = ((end - start) / step + 0.5).floor() as u64;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub point: PhasePoint,
    pub verdict: Verdict,
}

/// Verdicts over `alphas × betas`, α varying slowest.
pub fn phase_grid(
    alphas: &[f64],
    betas: &[f64],
    drift_side: DriftSide,
) -> Result<Vec<PhaseRow>, CriteriaError> {
    let mut rows = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha in alphas {
        for &beta in betas {
            let point = PhasePoint {
                alpha,
                beta,
                drift_side,
            };
            rows.push(PhaseRow {
                point,
                verdict: phase_power_law(point)?,
            });
        }
    }
    Ok(rows)
}

fn fmt_exponent(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

/// Columns `drift_side,alpha,beta,local,global,activation,rule` after a
/// `# frogwalk-phase-grid/1` line; `beta = inf` marks immortal walkers.
pub fn write_phase_csv<W: Write>(rows: &[PhaseRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "# {PHASE_GRID_FORMAT}")?;
    writeln!(out, "drift_side,alpha,beta,local,global,activation,rule")?;
    for r in rows {
        let rule = r.verdict.citations.last().map_or("", |c| c.tag());
        writeln!(
            out,
            "{},{},{},{:?},{:?},{:?},{}",
            r.point.drift_side,
            fmt_exponent(r.point.alpha),
            fmt_exponent(r.point.beta),
            r.verdict.local,
            r.verdict.global,
            r.verdict.infinite_activation,
            rule
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(alpha: f64, beta: f64, drift_side: DriftSide) -> Verdict {
        phase_power_law(PhasePoint {
            alpha,
            beta,
            drift_side,
        })
        .unwrap()
    }

    #[test]
    fn corner_cases() {
        assert_eq!(at(1.5, 2.5, DriftSide::Left).local, LocalStatus::SurvivesWP);
        let v = at(0.5, 1.2, DriftSide::Left);
        assert_eq!(v.local, LocalStatus::Dies);
        assert_eq!(v.global, GlobalStatus::Survives);
        assert_eq!(
            at(1.0, 2.0, DriftSide::Right).local,
            LocalStatus::SurvivesWP
        );
        assert_eq!(
            at(0.75, f64::INFINITY, DriftSide::Right).local,
            LocalStatus::Dies
        );
        assert_eq!(
            at(0.1, f64::INFINITY, DriftSide::Left).local,
            LocalStatus::SurvivesWP
        );
    }

    #[test]
    fn rejects_bad_exponents() {
        for (a, b) in [
            (0.0, 1.0),
            (-1.0, 1.0),
            (1.0, 0.0),
            (f64::NAN, 1.0),
            (1.0, f64::NAN),
        ] {
            let pt = PhasePoint {
                alpha: a,
                beta: b,
                drift_side: DriftSide::Left,
            };
            assert!(phase_power_law(pt).is_err());
        }
    }

    #[test]
    fn grid_values_are_exact_multiples() {
        let v = grid_values(0.25, 3.0, 0.25).unwrap();
        assert_eq!(v.len(), 12);
        assert_eq!(v[11], 3.0);
        assert!(grid_values(1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn csv_rows() {
        let rows = phase_grid(&[1.0], &[2.0, f64::INFINITY], DriftSide::Right).unwrap();
        let mut buf = Vec::new();
        write_phase_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[2],
            "right,1,2,SurvivesWP,Survives,SurvivesWP,phase-right"
        );
        assert_eq!(
            lines[3],
            "right,1,inf,SurvivesAS,Trivial,SurvivesAS,right-power-law"
        );
    }
}

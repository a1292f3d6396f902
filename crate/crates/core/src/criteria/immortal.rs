//! Immortal walkers: right drift, left drift and mixtures.

use std::cmp::Ordering;

use crate::analytics::{
    canonical_test_sequence, classify_sumexp_tail, origin_return_deficit, tilt, SeriesStatus,
};
use crate::asymptotic::{Expansion, Scale};
use crate::model::{Boundaries, Count, Density, ModelSpec, Role, SequenceFamily, Side, Tail};

use super::{is_immortal, CriteriaError, GlobalStatus, LocalStatus, Rule, Verdict};

/// Horizon of the canonical-sequence diagnostics.
const CANONICAL_HORIZON: u64 = 10_000;
/// Horizon of the firework-series diagnostic, which costs `O(h²)`.
const FIREWORK_HORIZON: u64 = 2_000;

/// Outcome of `Σ (l_n/(1−l_n))^n` over the right-drift sites.
pub(crate) struct RightSeries {
    pub status: SeriesStatus,
    pub rules: Vec<Rule>,
    pub note: Option<String>,
    pub sumexp: String,
}

/// Decide the right-drift series from the tail of `l_n` (approaching 1/2
/// from below, or a constant below 1/2).
pub(crate) fn right_drift_series(tail: &Tail) -> RightSeries {
    let delta = tilt(tail);
    let sumexp = match origin_return_deficit(tail, &Tail::Constant(1.0)) {
        Some(a) => {
            let (s, r) = classify_sumexp_tail(&a);
            format!("{s:?} ({})", r.tag())
        }
        None => "unknown deficit".to_string(),
    };
    let mut out = RightSeries {
        status: SeriesStatus::Inconclusive,
        rules: Vec::new(),
        note: None,
        sumexp,
    };
    let n_delta = delta.mul_scale(Scale::N);
    if n_delta.bounded() == Some(true) {
        out.status = SeriesStatus::Diverges;
        out.rules.push(Rule::BoundedTilt);
        return out;
    }
    let ratio = n_delta.mul_scale(Scale::new(0.0, -1.0, 0.0));
    let Some(lead) = ratio.leading() else {
        out.note = Some("leading behaviour of n(1/2 − l_n)/ln n is unknown".into());
        return out;
    };
    match lead.scale.growth_cmp(&Scale::ONE) {
        Ordering::Less => {
            out.status = SeriesStatus::Diverges;
            out.rules.push(Rule::TiltBelowQuarterLog);
        }
        Ordering::Greater => {
            out.status = SeriesStatus::Converges;
            out.rules.push(Rule::ExponentialTiltSum);
        }
        Ordering::Equal if lead.coeff < 0.25 => {
            out.status = SeriesStatus::Diverges;
            out.rules.push(Rule::TiltBelowQuarterLog);
        }
        Ordering::Equal if lead.coeff > 0.25 => {
            out.status = SeriesStatus::Converges;
            out.rules.push(Rule::TiltAboveQuarterLog);
        }
        Ordering::Equal => match borderline(&delta) {
            SeriesStatus::Converges => {
                out.status = SeriesStatus::Converges;
                out.rules.push(Rule::TiltAboveQuarterLog);
            }
            SeriesStatus::Diverges => {
                out.status = SeriesStatus::Diverges;
                out.rules.push(Rule::TiltBelowQuarterLog);
            }
            SeriesStatus::Inconclusive => {
                out.note = Some(
                    "n(1/2 − l_n)/ln n → 1/4: borderline, lower-order terms decide and both \
                     outcomes occur"
                        .into(),
                );
            }
        },
    }
    out
}

/// At `n δ_n ~ ln(n)/4` the second-order terms of
/// `a_n = 2δ/(1/2 + δ) = 4δ − 8δ² + O(δ³)` decide.
fn borderline(delta: &Expansion) -> SeriesStatus {
    let Some(lead) = delta.leading() else {
        return SeriesStatus::Inconclusive;
    };
    let d2 = delta.mul(delta);
    let rest = Expansion::with_error(Vec::new(), lead.scale.powf(2.5));
    let a = delta.scale(4.0).sub(&d2.scale(8.0)).add(&rest);
    classify_sumexp_tail(&a).0
}

/// The family that describes the tail of `f`.
fn tail_family(f: &SequenceFamily) -> &SequenceFamily {
    match f {
        SequenceFamily::Table { tail: Some(t), .. } => tail_family(t),
        SequenceFamily::Piecewise { pieces } => match pieces.last() {
            Some(p) if p.end.is_none() => tail_family(&p.family),
            _ => f,
        },
        _ => f,
    }
}

fn require_immortal(spec: &ModelSpec) -> Result<(), CriteriaError> {
    if is_immortal(spec) {
        Ok(())
    } else {
        Err(CriteriaError::Precondition(
            "some occupied walker is mortal".into(),
        ))
    }
}

fn immortal_verdict() -> Verdict {
    let mut v = Verdict::inconclusive();
    v.global = GlobalStatus::Trivial;
    v.cite(Rule::ImmortalWalkers);
    v
}

/// All walkers drift right. Local survival has probability 0 or 1 according to
/// `Σ (l_n/(1−l_n))^n`; the origin walker activates everyone.
pub fn classify_right_drift_immortal(spec: &ModelSpec) -> Result<Verdict, CriteriaError> {
    require_immortal(spec)?;
    let prof = spec.profile(Role::Drift, 0.5);
    if prof.above.is_positive() || prof.equal.is_positive() {
        return Err(CriteriaError::Precondition(
            "some l_n ≥ 1/2; use the mixed classifier".into(),
        ));
    }
    let mut v = immortal_verdict();
    v.infinite_activation = LocalStatus::SurvivesAS;
    v.cite(Rule::RightDriftZeroOne);
    let density = spec.occupied().density();
    if let Density::Finite(sites) = &density {
        v.local = LocalStatus::Dies;
        v.infinite_activation = LocalStatus::Dies;
        v.cite(Rule::FiniteOccupancy);
        v.diag("occupied_sites", sites.len());
        return Ok(v.finish());
    }
    let Some(tail) = spec.drift().tail() else {
        v.note("no tail rule for l_n: the series cannot be decided");
        return Ok(v.finish());
    };
    let series = right_drift_series(&tail);
    v.diag("sumexp", &series.sumexp);
    if let Some(n) = series.note {
        v.note(n);
    }
    let status = match (series.status, &density) {
        (SeriesStatus::Diverges, Density::Sparse) => {
            v.note("divergence along all of ℕ does not transfer to sparse occupied sites");
            SeriesStatus::Inconclusive
        }
        (s, _) => s,
    };
    match status {
        SeriesStatus::Converges => v.local = LocalStatus::Dies,
        SeriesStatus::Diverges => v.local = LocalStatus::SurvivesAS,
        SeriesStatus::Inconclusive => {}
    }
    if v.local != LocalStatus::Inconclusive {
        for r in series.rules {
            v.cite(r);
        }
        if matches!(
            tail_family(spec.drift()),
            SequenceFamily::PowerLawBelow { .. }
        ) {
            v.cite(Rule::RightPowerLaw);
        }
    }
    Ok(v.finish())
}

/// All walkers drift left. Local survival and infinite activation coincide.
pub fn classify_left_drift_immortal(spec: &ModelSpec) -> Result<Verdict, CriteriaError> {
    require_immortal(spec)?;
    let prof = spec.profile(Role::Drift, 0.5);
    if prof.below.is_positive() || prof.equal.is_positive() {
        return Err(CriteriaError::Precondition(
            "some l_n ≤ 1/2; use the mixed classifier".into(),
        ));
    }
    let mut v = immortal_verdict();
    let density = spec.occupied().density();
    if let Density::Finite(sites) = &density {
        v.local = LocalStatus::Dies;
        v.infinite_activation = LocalStatus::Dies;
        v.cite(Rule::FiniteOccupancy);
        v.diag("occupied_sites", sites.len());
        return Ok(v.finish());
    }
    v.cite(Rule::LeftDriftEquivalence);
    let Some(tail) = spec.drift().tail() else {
        v.note("no tail rule for l_n");
        return Ok(v.finish());
    };
    if tail.limit() > 0.5 {
        v.local = LocalStatus::Dies;
        v.infinite_activation = LocalStatus::Dies;
        v.cite(Rule::GenerationChain);
        v.diag("liminf_l", tail.limit());
        return Ok(v.finish());
    }
    let excess = tail.offset_from(0.5);
    v.diag("l_minus_half", excess.to_string());
    if let Ok(seq) = canonical_test_sequence(spec, CANONICAL_HORIZON) {
        v.diag("canonical_sequence_len", seq.len());
        v.diag("canonical_sequence_head", &seq[..seq.len().min(12)]);
    }
    if let Ok((partial, terms)) = firework_series_partial(spec, FIREWORK_HORIZON) {
        v.diag("firework_series_partial", partial);
        v.diag("firework_series_terms", terms);
    }
    if density == Density::Sparse {
        v.note("block and sequence tests need occupied sites with bounded gaps");
        return Ok(v.finish());
    }
    let sequence_test = excess.summable() == Some(true);
    let block = block_size(&excess);
    if sequence_test {
        v.cite(Rule::SequenceTest);
    }
    if let Some(l) = block {
        v.cite(Rule::BlockTest);
        v.diag("block_size", l);
    }
    if sequence_test || block.is_some() {
        v.local = LocalStatus::SurvivesWP;
        v.infinite_activation = LocalStatus::SurvivesWP;
        match tail_family(spec.drift()) {
            SequenceFamily::PowerLawAbove { .. } => v.cite(Rule::LeftPowerLaw),
            SequenceFamily::Staircase {
                side: Side::Above,
                boundaries: Boundaries::Power { .. },
                ..
            } if !sequence_test => v.cite(Rule::CubeStaircase),
            _ => {}
        }
    } else {
        v.note(
            "inf l_n = 1/2 and neither the sequence test nor a block test certifies \
             survival; slowly decaying drifts can go either way",
        );
    }
    Ok(v.finish())
}

/// Smallest `L` with `Σ (l_n − 1/2)^L < ∞`, if any.
fn block_size(excess: &Expansion) -> Option<u32> {
    let lead = excess.leading()?;
    if lead.coeff <= 0.0 || lead.scale.power >= 0.0 {
        return None;
    }
    let first = (-1.0 / lead.scale.power).floor().max(0.0) as u32 + 1;
    (first.max(1)..first + 3).find(|&l| {
        excess
            .powf(l as f64)
            .and_then(|e| e.summable())
            .unwrap_or(false)
    })
}

/// Partial sum of `Σ_k ∏_{i ≤ n_k} (1 − ρ_i^{n_{k+1} − i})` over the canonical
/// sequence, `ρ_i = (1 − l_i)/l_i`. Reported only; a finite prefix says
/// nothing about convergence.
fn firework_series_partial(spec: &ModelSpec, horizon: u64) -> Result<(f64, usize), CriteriaError> {
    let seq = canonical_test_sequence(spec, horizon)?;
    let sites = spec.occupied().sites_up_to(horizon);
    let mut rho = Vec::with_capacity(sites.len());
    for &i in &sites {
        let l = spec.eval_drift(i)?;
        rho.push(((1.0 - l) / l).ln());
    }
    let mut sum = 0.0;
    for w in seq.windows(2) {
        let (nk, next) = (w[0], w[1]);
        let mut log_prod = 0.0;
        for (&i, &lr) in sites.iter().zip(&rho) {
            if i > nk {
                break;
            }
            log_prod += (-((next - i) as f64 * lr).exp()).ln_1p();
        }
        sum += log_prod.exp();
    }
    Ok((sum, seq.len().saturating_sub(1)))
}

/// Both drift directions occur.
pub fn classify_mixed_immortal(spec: &ModelSpec) -> Result<Verdict, CriteriaError> {
    require_immortal(spec)?;
    let prof = spec.profile(Role::Drift, 0.5);
    if prof.equal.is_positive() {
        return Err(CriteriaError::Precondition(
            "some l_n = 1/2 with p_n = 1".into(),
        ));
    }
    if !(prof.below.is_positive() && prof.above.is_positive()) {
        return Err(CriteriaError::Precondition(
            "both drift directions must occur".into(),
        ));
    }
    let mut v = immortal_verdict();
    v.cite(Rule::MixedDrift);
    let Some(j) = prof.first_below else {
        v.note("first right-drift site unknown");
        return Ok(v.finish());
    };
    v.diag("first_right_drift_site", j);
    // the walker at j visits every site to its right, and every site left of
    // j was crossed before j woke up
    let reached = if j == 0 {
        LocalStatus::SurvivesAS
    } else {
        LocalStatus::SurvivesWP
    };
    v.infinite_activation = reached;
    match prof.above {
        Count::Infinite => v.local = reached,
        Count::Finite(k) => {
            v.diag("left_drift_sites", k);
            if let Density::Finite(_) = spec.occupied().density() {
                v.local = LocalStatus::Dies;
                v.infinite_activation = LocalStatus::Dies;
                v.cite(Rule::FiniteOccupancy);
                return Ok(v.finish());
            }
            let Some(tail) = spec.drift().tail() else {
                v.note("no tail rule for l_n");
                return Ok(v.finish());
            };
            let series = right_drift_series(&tail);
            v.diag("sumexp", &series.sumexp);
            if let Some(n) = series.note {
                v.note(n);
            }
            let decided = match series.status {
                SeriesStatus::Converges => Some(LocalStatus::Dies),
                SeriesStatus::Diverges if spec.occupied().density() != Density::Sparse => {
                    Some(reached)
                }
                _ => None,
            };
            if let Some(s) = decided {
                v.local = s;
                v.cite(Rule::RightDriftZeroOne);
                for r in series.rules {
                    v.cite(r);
                }
                if matches!(
                    tail_family(spec.drift()),
                    SequenceFamily::PowerLawBelow { .. }
                ) {
                    v.cite(Rule::RightPowerLaw);
                }
            }
        }
        Count::Unknown => v.note("number of left-drift sites unknown"),
    }
    Ok(v.finish())
}

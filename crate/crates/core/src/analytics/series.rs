//! Series of the form `Σ (1 − a_n)^n`, products `∏ (1 − α_i)^{k_i}`, and the
//! running-minimum test sequence of a left-drift model.

use std::cmp::Ordering;

use serde::Serialize;

use crate::asymptotic::{Expansion, Scale, Term};
use crate::model::{ModelSpec, Role};

use super::AnalyticsError;

/// Terms summed numerically for diagnostics; never used to decide.
const NUMERIC_TERMS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeriesStatus {
    Converges,
    Diverges,
    Inconclusive,
}

/// Which analytic rule decided a `Σ (1 − a_n)^n` series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumexpRule {
    /// `liminf n·a_n < ∞` forces divergence.
    BoundedProduct,
    /// `a_n ≤ ln n / n` eventually forces divergence.
    BelowLogOverN,
    /// `a_n ≥ (ln n + β ln ln n)/n` eventually, `β > 1`, forces convergence.
    AboveLogLogShift,
    /// Only finitely many terms.
    FiniteSum,
    /// No rule applied.
    None,
}

impl SumexpRule {
    pub fn tag(self) -> &'static str {
        match self {
            SumexpRule::BoundedProduct => "sumexp-bounded-product",
            SumexpRule::BelowLogOverN => "sumexp-below-log-over-n",
            SumexpRule::AboveLogLogShift => "sumexp-above-loglog-shift",
            SumexpRule::FiniteSum => "finite-sum",
            SumexpRule::None => "no-rule",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub status: SeriesStatus,
    pub partial_sum: f64,
    pub terms_used: u64,
    pub justification: SumexpRule,
}

/// `a_1, a_2, …` given by explicit values followed by an optional tail rule.
/// The tail is indexed absolutely: term `n` uses `tail(n)` once
/// `n > prefix.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumexpSequence {
    pub prefix: Vec<f64>,
    pub tail: Option<Expansion>,
}

impl SumexpSequence {
    pub fn symbolic(tail: Expansion) -> Self {
        SumexpSequence {
            prefix: Vec::new(),
            tail: Some(tail),
        }
    }
}

/// Decide `Σ (1 − a_n)^n` from the tail rule of `a_n`.
pub fn classify_sumexp_tail(a: &Expansion) -> (SeriesStatus, SumexpRule) {
    if a.is_zero() {
        return (SeriesStatus::Diverges, SumexpRule::BoundedProduct);
    }
    let na = a.mul_scale(Scale::N);
    match na.bounded() {
        Some(true) => return (SeriesStatus::Diverges, SumexpRule::BoundedProduct),
        Some(false) => {}
        None => return (SeriesStatus::Inconclusive, SumexpRule::None),
    }
    let excess = na.sub(&Expansion::monomial(1.0, Scale::LOG));
    match excess.leading() {
        None if excess.is_exact() => (SeriesStatus::Diverges, SumexpRule::BelowLogOverN),
        None => (SeriesStatus::Inconclusive, SumexpRule::None),
        Some(t) if t.coeff < 0.0 => (SeriesStatus::Diverges, SumexpRule::BelowLogOverN),
        Some(t) => match t.scale.growth_cmp(&Scale::LOGLOG) {
            Ordering::Greater => (SeriesStatus::Converges, SumexpRule::AboveLogLogShift),
            Ordering::Equal if t.coeff > 1.0 => {
                (SeriesStatus::Converges, SumexpRule::AboveLogLogShift)
            }
            _ => (SeriesStatus::Inconclusive, SumexpRule::None),
        },
    }
}

/// Decide `Σ_{n ≥ 1} (1 − a_n)^n`. Numeric partial sums are reported but a
/// verdict needs a tail rule.
pub fn classify_sumexp(seq: &SumexpSequence) -> Result<SeriesVerdict, AnalyticsError> {
    for (i, &a) in seq.prefix.iter().enumerate() {
        if !(0.0..=1.0).contains(&a) {
            return Err(AnalyticsError::Domain(format!(
                "a_{} = {a} outside [0, 1]",
                i + 1
            )));
        }
    }
    if let Some(t) = &seq.tail {
        if let Some(lead) = t.leading() {
            let too_big = lead.scale.growth_cmp(&Scale::ONE) == Ordering::Greater
                || (lead.scale == Scale::ONE && lead.coeff > 1.0);
            if lead.coeff < 0.0 || too_big {
                return Err(AnalyticsError::Domain(format!(
                    "tail rule {t} leaves [0, 1]"
                )));
            }
        }
    }
    let mut partial = 0.0;
    let mut used = 0;
    for (i, &a) in seq.prefix.iter().enumerate() {
        partial += (1.0 - a).powi(i as i32 + 1);
        used += 1;
    }
    let (status, justification) = match &seq.tail {
        None => (SeriesStatus::Inconclusive, SumexpRule::None),
        Some(t) => {
            let start = seq.prefix.len() as u64 + 1;
            for n in start..start.max(NUMERIC_TERMS) {
                let a = t.eval(n as f64).clamp(0.0, 1.0);
                partial += ((n as f64) * (-a).ln_1p()).exp();
                used += 1;
            }
            classify_sumexp_tail(t)
        }
    };
    Ok(SeriesVerdict {
        status,
        partial_sum: partial,
        terms_used: used,
        justification,
    })
}

/// `α_1, α_2, …` and multiplicities `k_1, k_2, …`: explicit prefixes, then
/// tail rules indexed absolutely.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductSequence {
    pub alpha_prefix: Vec<f64>,
    pub k_prefix: Vec<u64>,
    pub alpha_tail: Expansion,
    pub k_tail: Expansion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductVerdict {
    pub positive: bool,
    pub annotation: String,
}

/// Whether `∏ (1 − α_i)^{k_i} > 0`, which for `α_i ∈ [0, 1)` and `k_i ≥ 1`
/// holds exactly when `Σ k_i α_i < ∞`.
pub fn product_positive(seq: &ProductSequence) -> Result<ProductVerdict, AnalyticsError> {
    if seq.alpha_prefix.len() != seq.k_prefix.len() {
        return Err(AnalyticsError::Domain(
            "alpha and k prefixes differ in length".into(),
        ));
    }
    for (i, (&a, &k)) in seq.alpha_prefix.iter().zip(&seq.k_prefix).enumerate() {
        if !(0.0..=1.0).contains(&a) {
            return Err(AnalyticsError::Domain(format!("alpha_{} = {a}", i + 1)));
        }
        if k == 0 {
            return Err(AnalyticsError::Domain(format!("k_{} = 0", i + 1)));
        }
        if a == 1.0 {
            return Ok(ProductVerdict {
                positive: false,
                annotation: format!("factor {} is zero", i + 1),
            });
        }
    }
    let k_lead = seq
        .k_tail
        .leading()
        .ok_or_else(|| AnalyticsError::Domain("multiplicity tail has no leading term".into()))?;
    if k_lead.coeff <= 0.0 || k_lead.scale.growth_cmp(&Scale::ONE) == Ordering::Less {
        return Err(AnalyticsError::Domain(
            "multiplicities must stay at least 1".into(),
        ));
    }
    if let Some(a) = seq.alpha_tail.leading() {
        if a.coeff < 0.0 || a.scale.growth_cmp(&Scale::ONE) == Ordering::Greater {
            return Err(AnalyticsError::Domain("alpha tail leaves [0, 1)".into()));
        }
        if a.scale == Scale::ONE && a.coeff >= 1.0 {
            return Ok(ProductVerdict {
                positive: false,
                annotation: "factors tend to zero".into(),
            });
        }
    }
    let series = seq.k_tail.mul(&seq.alpha_tail);
    match series.summable() {
        Some(true) => Ok(ProductVerdict {
            positive: true,
            annotation: format!(
                "sum of k_i alpha_i converges (terms ~ {})",
                lead_str(&series)
            ),
        }),
        Some(false) => Ok(ProductVerdict {
            positive: false,
            annotation: format!(
                "sum of k_i alpha_i diverges (terms ~ {})",
                lead_str(&series)
            ),
        }),
        None => Err(AnalyticsError::Domain(
            "leading behaviour of k_i alpha_i unknown".into(),
        )),
    }
}

fn lead_str(e: &Expansion) -> String {
    e.leading().map_or_else(
        || "0".to_string(),
        |Term { coeff, scale }| format!("{coeff}·{scale}"),
    )
}

/// Sites where `h(n) = min_{k ≤ n} (2l_k − 1)/l_k` strictly drops, over occupied
/// sites up to `horizon`; the first occupied site is always included.
pub fn canonical_test_sequence(spec: &ModelSpec, horizon: u64) -> Result<Vec<u64>, AnalyticsError> {
    let mut out = Vec::new();
    let mut h = f64::INFINITY;
    for n in spec.occupied().sites_up_to(horizon) {
        let l = spec.sample(Role::Drift, n)?.value;
        if l <= 0.5 {
            return Err(AnalyticsError::Precondition(format!(
                "l_{n} = {l} is not a left drift"
            )));
        }
        let v = (2.0 * l - 1.0) / l;
        if v < h {
            h = v;
            out.push(n);
        }
    }
    Ok(out)
}

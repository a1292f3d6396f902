//! Closed-form hitting probabilities of a single mortal walker, and the series
//! tests every survival criterion reduces to.

mod deficit;
mod series;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelSpec};

pub use deficit::{lifetime_deficit, origin_return_deficit, r_sequence, tilt};
pub use series::{
    canonical_test_sequence, classify_sumexp, classify_sumexp_tail, product_positive,
    ProductSequence, ProductVerdict, SeriesStatus, SeriesVerdict, SumexpRule, SumexpSequence,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("invalid step law: p = {p}, l = {l}")]
    InvalidLaw { p: f64, l: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One-step law of a walker: survive with `p`, then jump left with `l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLaw {
    p: f64,
    l: f64,
}

impl StepLaw {
    pub fn new(p: f64, l: f64) -> Result<Self, AnalyticsError> {
        if (0.0..=1.0).contains(&p) && l > 0.0 && l < 1.0 {
            Ok(StepLaw { p, l })
        } else {
            Err(AnalyticsError::InvalidLaw { p, l })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Masses of (left, right, death).
    pub fn masses(&self) -> (f64, f64, f64) {
        (self.p * self.l, self.p * (1.0 - self.l), 1.0 - self.p)
    }

    /// The walker with left and right exchanged.
    pub fn mirrored(&self) -> StepLaw {
        StepLaw {
            p: self.p,
            l: 1.0 - self.l,
        }
    }

    /// The law of walker `n` in `spec`.
    pub fn at_site(spec: &ModelSpec, n: u64) -> Result<Self, AnalyticsError> {
        StepLaw::new(spec.eval_lifetime(n)?, spec.eval_drift(n)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

/// `1 − 4p²l(1−l)`, evaluated as `(2pl − 1)² + 4p(1−p)l` so that it keeps its
/// relative accuracy near `p = 1, l = 1/2`.
pub fn radicand(p: f64, l: f64) -> f64 {
    let a = 2.0 * p * l - 1.0;
    a * a + 4.0 * p * (1.0 - p) * l
}

/// Probability of ever reaching the site one step to the left.
pub fn first_passage_left(law: StepLaw) -> f64 {
    first_passage_left_raw(law.p, law.l)
}

/// Probability of ever reaching the site one step to the right.
pub fn first_passage_right(law: StepLaw) -> f64 {
    first_passage_left_raw(law.p, 1.0 - law.l)
}

pub fn first_passage(law: StepLaw, direction: Direction) -> f64 {
    match direction {
        Direction::Left => first_passage_left(law),
        Direction::Right => first_passage_right(law),
    }
}

/// Same as [`first_passage_left`] without validating the arguments; also
/// defined at `l ∈ {0, 1}`.
pub(crate) fn first_passage_left_raw(p: f64, l: f64) -> f64 {
    let v = 2.0 * p * l / (1.0 + radicand(p, l).sqrt());
    v.min(1.0)
}

/// `P(A_n | B_n)`: walker `n`, once active, ever visits the origin.
pub fn prob_visit_origin_given_active(spec: &ModelSpec, n: u64) -> Result<f64, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::Domain(
            "the origin walker starts at the origin".into(),
        ));
    }
    let law = StepLaw::at_site(spec, n)?;
    Ok(powu(first_passage_left(law), n))
}

/// Walker `n`, once active, ever visits site `m > n`.
pub fn prob_reach_right_given_active(
    spec: &ModelSpec,
    n: u64,
    m: u64,
) -> Result<f64, AnalyticsError> {
    if m <= n {
        return Err(AnalyticsError::Domain(format!(
            "target {m} must lie right of {n}"
        )));
    }
    let law = StepLaw::at_site(spec, n)?;
    Ok(powu(first_passage_right(law), m - n))
}

/// `P(R ≥ k)` for the maximal rightward excursion `R` of a walker.
pub fn max_right_excursion_tail(law: StepLaw, k: i64) -> Result<f64, AnalyticsError> {
    if k < 0 {
        return Err(AnalyticsError::Domain(format!("negative distance {k}")));
    }
    Ok(powu(first_passage_right(law), k as u64))
}

fn powu(x: f64, k: u64) -> f64 {
    if k <= i32::MAX as u64 {
        x.powi(k as i32)
    } else {
        x.powf(k as f64)
    }
}

/// `∏_{i≥1} (1 − ρ^i)` for `ρ ∈ [0, 1)`, with a bound on the neglected tail
/// factor: the true value lies in `[value·(1 − bound), value]`.
pub fn absorption_product(rho: f64, tolerance: f64) -> Result<(f64, f64), AnalyticsError> {
    if !(0.0..1.0).contains(&rho) {
        return Err(AnalyticsError::Domain(format!("ratio {rho} not in [0, 1)")));
    }
    let mut log_sum = 0.0;
    let mut r = rho;
    loop {
        // ∏_{j>i}(1 − ρ^j) ≥ 1 − Σ_{j>i} ρ^j = 1 − ρ^{i+1}/(1 − ρ)
        let rest = r * rho / (1.0 - rho);
        log_sum += (-r).ln_1p();
        if rest < tolerance {
            return Ok((log_sum.exp(), rest));
        }
        r *= rho;
    }
}

/// `min_{1 ≤ n ≤ max_n} n·(1 − ln n/n)^n` and where it is attained. The
/// constant in the lower bound `(1 − ln n/n)^n ≥ c/n` is only known to exist;
/// this reports its empirical value.
pub fn sumexp_constant_diagnostic(max_n: u64) -> (u64, f64) {
    let mut best = (1, 1.0);
    for n in 2..=max_n {
        let x = n as f64;
        let v = x * (x * (-x.ln() / x).ln_1p()).exp();
        if v < best.1 {
            best = (n, v);
        }
    }
    best
}

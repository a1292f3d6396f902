//! Survival and extinction classifiers. Every decisive field of a [`Verdict`]
//! carries the rule that justified it.

mod environment;
mod immortal;
mod mortal;
mod phase;

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::model::{Density, ModelError, ModelSpec, Role};

pub use environment::{classify_random_environment, EnvironmentLaw, EnvironmentReport};
pub use immortal::{
    classify_left_drift_immortal, classify_mixed_immortal, classify_right_drift_immortal,
};
pub use mortal::{classify_mortal, classify_mortal_global, classify_mortal_local};
pub use phase::{
    grid_values, phase_grid, phase_power_law, power_law_spec, write_phase_csv, DriftSide,
    PhasePoint, PhaseRow, PHASE_GRID_FORMAT,
};

/// Largest block size tried when searching for a block plan.
pub const DEFAULT_MAX_BLOCK: usize = 64;

pub const VERDICT_FORMAT: &str = "frogwalk-verdict/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid phase point: {0}")]
    InvalidPoint(String),
    #[error("block plan does not match the model's occupied sites")]
    PlanMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// Local survival or infinite activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LocalStatus {
    /// With probability one.
    SurvivesAS,
    /// With positive probability.
    SurvivesWP,
    Dies,
    Inconclusive,
}

impl LocalStatus {
    pub fn survives(self) -> bool {
        matches!(self, LocalStatus::SurvivesAS | LocalStatus::SurvivesWP)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GlobalStatus {
    Survives,
    Dies,
    /// Some walker never dies.
    Trivial,
    Inconclusive,
}

impl GlobalStatus {
    pub fn survives(self) -> bool {
        matches!(self, GlobalStatus::Survives | GlobalStatus::Trivial)
    }
}

/// One-word summary of a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    SurvivesAS,
    SurvivesWP,
    /// Global survival with local extinction, among mortal walkers. Immortal
    /// models survive globally by default and summarise as `Dies`.
    GlobalOnly,
    Dies,
    Inconclusive,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Outcome::SurvivesAS => "SurvivesAS",
            Outcome::SurvivesWP => "SurvivesWP",
            Outcome::GlobalOnly => "GlobalOnly",
            Outcome::Dies => "Dies",
            Outcome::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// The results a classifier can rest on. `tag` is a stable identifier,
/// `label` the conventional name of the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    ImmortalWalkers,
    RecurrentWalker,
    FiniteOccupancy,
    RightDriftZeroOne,
    LeftDriftEquivalence,
    BoundedTilt,
    TiltBelowQuarterLog,
    TiltAboveQuarterLog,
    ExponentialTiltSum,
    MixedDrift,
    SequenceTest,
    FireworkComparison,
    RightPowerLaw,
    BlockTest,
    LeftPowerLaw,
    CubeStaircase,
    GenerationChain,
    LifetimeMonotonicity,
    ImmortalSite,
    BoundedLifetime,
    GlobalBlocks,
    HeadSeries,
    ExtinctionByDeficit,
    ExtinctionByDrift,
    ExtinctionByLifetime,
    SurvivalBoundedDeficit,
    SurvivalDeficitBelowLog,
    SurvivalBlockSeries,
    PhaseLeft,
    PhaseRight,
    EnvironmentZeroOne,
    EnvironmentBounded,
    EnvironmentBelowLog,
    EnvironmentAboveLog,
}

const RULES: &[(Rule, &str, &str)] = &[
    (
        Rule::ImmortalWalkers,
        "immortal-walkers",
        "immortal walkers",
    ),
    (
        Rule::RecurrentWalker,
        "recurrent-walker",
        "recurrent immortal walker",
    ),
    (
        Rule::FiniteOccupancy,
        "finite-occupancy",
        "finitely many walkers",
    ),
    (
        Rule::RightDriftZeroOne,
        "right-drift-zero-one",
        "Theorem 2.1(1)",
    ),
    (
        Rule::LeftDriftEquivalence,
        "left-drift-equivalence",
        "Theorem 2.1(2)",
    ),
    (Rule::BoundedTilt, "bounded-tilt", "Corollary 2.2(1)"),
    (
        Rule::TiltBelowQuarterLog,
        "tilt-below-quarter-log",
        "Corollary 2.2(2)",
    ),
    (
        Rule::TiltAboveQuarterLog,
        "tilt-above-quarter-log",
        "Corollary 2.2(3)",
    ),
    (
        Rule::ExponentialTiltSum,
        "exponential-tilt-sum",
        "Corollary 2.2(4)",
    ),
    (Rule::MixedDrift, "mixed-drift", "Remark 2.3"),
    (Rule::SequenceTest, "sequence-test", "Remark 2.4"),
    (
        Rule::FireworkComparison,
        "firework-comparison",
        "Proposition 2.5",
    ),
    (Rule::RightPowerLaw, "right-power-law", "Example 2.6"),
    (Rule::BlockTest, "block-test", "Theorem 2.7"),
    (Rule::LeftPowerLaw, "left-power-law", "Example 2.8"),
    (Rule::CubeStaircase, "cube-staircase", "Example 2.9"),
    (
        Rule::GenerationChain,
        "generation-chain",
        "Proposition 2.10",
    ),
    (
        Rule::LifetimeMonotonicity,
        "lifetime-monotonicity",
        "monotonicity in p_n",
    ),
    (Rule::ImmortalSite, "immortal-site", "some p_n = 1"),
    (Rule::BoundedLifetime, "bounded-lifetime", "Proposition 3.2"),
    (Rule::GlobalBlocks, "global-blocks", "Theorem 3.3"),
    (Rule::HeadSeries, "head-series", "Theorem 3.4"),
    (
        Rule::ExtinctionByDeficit,
        "extinction-by-deficit",
        "Theorem 3.4(1)",
    ),
    (
        Rule::ExtinctionByDrift,
        "extinction-by-drift",
        "Theorem 3.4(2)",
    ),
    (
        Rule::ExtinctionByLifetime,
        "extinction-by-lifetime",
        "Theorem 3.4(3)",
    ),
    (
        Rule::SurvivalBoundedDeficit,
        "survival-bounded-deficit",
        "Theorem 3.5(1)",
    ),
    (
        Rule::SurvivalDeficitBelowLog,
        "survival-deficit-below-log",
        "Theorem 3.5(2)",
    ),
    (
        Rule::SurvivalBlockSeries,
        "survival-block-series",
        "Theorem 3.5(3)",
    ),
    (Rule::PhaseLeft, "phase-left", "Corollary 3.6(1)"),
    (Rule::PhaseRight, "phase-right", "Corollary 3.6(2)"),
    (
        Rule::EnvironmentZeroOne,
        "environment-zero-one",
        "Theorem 4.1",
    ),
    (
        Rule::EnvironmentBounded,
        "environment-bounded",
        "Theorem 4.1(1)",
    ),
    (
        Rule::EnvironmentBelowLog,
        "environment-below-log",
        "Theorem 4.1(2)",
    ),
    (
        Rule::EnvironmentAboveLog,
        "environment-above-log",
        "Theorem 4.1(3)",
    ),
];

impl Rule {
    fn entry(self) -> &'static (Rule, &'static str, &'static str) {
        RULES
            .iter()
            .find(|(r, _, _)| *r == self)
            .expect("every rule has a table entry")
    }

    pub fn tag(self) -> &'static str {
        self.entry().1
    }

    pub fn label(self) -> &'static str {
        self.entry().2
    }

    pub fn all() -> impl Iterator<Item = Rule> {
        RULES.iter().map(|(r, _, _)| *r)
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rule", 2)?;
        s.serialize_field("tag", self.tag())?;
        s.serialize_field("label", self.label())?;
        s.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub local: LocalStatus,
    pub global: GlobalStatus,
    pub infinite_activation: LocalStatus,
    pub citations: Vec<Rule>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn inconclusive() -> Self {
        Verdict {
            local: LocalStatus::Inconclusive,
            global: GlobalStatus::Inconclusive,
            infinite_activation: LocalStatus::Inconclusive,
            citations: Vec::new(),
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn summary(&self) -> Outcome {
        match self.local {
            LocalStatus::SurvivesAS => Outcome::SurvivesAS,
            LocalStatus::SurvivesWP => Outcome::SurvivesWP,
            LocalStatus::Dies if self.global == GlobalStatus::Survives => Outcome::GlobalOnly,
            LocalStatus::Dies => Outcome::Dies,
            LocalStatus::Inconclusive => Outcome::Inconclusive,
        }
    }

    /// Whether the local question was settled.
    pub fn is_decisive(&self) -> bool {
        self.local != LocalStatus::Inconclusive
    }

    pub fn cites(&self, rule: Rule) -> bool {
        self.citations.contains(&rule)
    }

    pub(crate) fn cite(&mut self, rule: Rule) {
        if !self.citations.contains(&rule) {
            self.citations.push(rule);
        }
    }

    pub(crate) fn diag(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.diagnostics.insert(key.to_string(), v);
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Apply the implications between the three events: local survival forces
    /// global survival and infinite activation.
    pub(crate) fn finish(mut self) -> Self {
        if self.local.survives() {
            debug_assert!(self.global != GlobalStatus::Dies, "{self:?}");
            debug_assert!(self.infinite_activation != LocalStatus::Dies, "{self:?}");
            if self.global == GlobalStatus::Inconclusive {
                self.global = GlobalStatus::Survives;
            }
            if self.infinite_activation == LocalStatus::Inconclusive {
                self.infinite_activation = LocalStatus::SurvivesWP;
            }
        }
        debug_assert!(
            !self.citations.is_empty()
                || (self.local == LocalStatus::Inconclusive
                    && self.global == GlobalStatus::Inconclusive
                    && self.infinite_activation == LocalStatus::Inconclusive),
            "decisive verdict without citation: {self:?}"
        );
        self
    }

    /// JSON record with a format tag.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("verdicts serialize");
        if let serde_json::Value::Object(map) = &mut v {
            map.insert("format".into(), VERDICT_FORMAT.into());
            map.insert("summary".into(), self.summary().to_string().into());
        }
        v
    }
}

/// Whether every occupied walker is immortal.
pub(crate) fn is_immortal(spec: &ModelSpec) -> bool {
    let prof = spec.profile(Role::Lifetime, 1.0);
    prof.below.is_zero() && prof.equal.is_positive()
}

/// Classify any model: immortal models by drift pattern, mortal ones by the
/// lifetime criteria with block sizes up to [`DEFAULT_MAX_BLOCK`].
pub fn classify(spec: &ModelSpec) -> Result<Verdict, CriteriaError> {
    classify_with(spec, DEFAULT_MAX_BLOCK)
}

pub fn classify_with(spec: &ModelSpec, max_block: usize) -> Result<Verdict, CriteriaError> {
    if let Some(site) = spec.recurrent_site() {
        return Ok(recurrent(spec, site));
    }
    if !is_immortal(spec) {
        return classify_mortal(spec, max_block);
    }
    let prof = spec.profile(Role::Drift, 0.5);
    let right = prof.below.is_positive();
    let left = prof.above.is_positive();
    let complete = ![prof.below, prof.above, prof.equal].contains(&crate::model::Count::Unknown);
    match (right, left) {
        (true, true) => classify_mixed_immortal(spec),
        (true, false) if complete => classify_right_drift_immortal(spec),
        (false, true) if complete => classify_left_drift_immortal(spec),
        _ => {
            let mut v = Verdict::inconclusive();
            v.global = GlobalStatus::Trivial;
            v.cite(Rule::ImmortalWalkers);
            v.note("drift values are not known at every occupied site (no tail rule)");
            Ok(v.finish())
        }
    }
}

/// A walker with `p = 1` and `l = 1/2` returns to the origin infinitely often
/// once activated, and it is activated with positive probability.
fn recurrent(spec: &ModelSpec, site: u64) -> Verdict {
    let mut v = Verdict::inconclusive();
    let status = if site == 0 {
        LocalStatus::SurvivesAS
    } else {
        LocalStatus::SurvivesWP
    };
    v.local = status;
    v.infinite_activation = if matches!(spec.occupied().density(), Density::Finite(_)) {
        LocalStatus::Dies
    } else {
        status
    };
    v.global = GlobalStatus::Trivial;
    v.cite(Rule::RecurrentWalker);
    v.cite(Rule::ImmortalSite);
    v.diag("recurrent_site", site);
    v.finish()
}

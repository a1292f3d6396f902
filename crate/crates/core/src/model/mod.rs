//! Model descriptions: drift `{l_n}`, lifetime `{p_n}`, and occupied sites.

mod blocks;
mod family;
mod occupancy;

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use blocks::BlockPlan;
pub use family::{Boundaries, Piece, SequenceFamily, Side, Tail};
pub use occupancy::{Density, Occupancy};

use family::LEVEL_EPS;

/// Sites scanned explicitly before relying on tail rules.
const SCAN_LIMIT: u64 = 2_000_000;

pub const MODEL_FORMAT: &str = "frogwalk-model/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("site {0} is not occupied")]
    NotOccupied(u64),
    #[error("{role} sequence has no value at site {site}")]
    OutOfDomain { role: Role, site: u64 },
    #[error("{role} value {value} at site {site} is out of range")]
    InvalidValue { role: Role, site: u64, value: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("p_0 must be positive, otherwise the process never starts")]
    DeadOrigin,
    #[error(
        "site {0} has p = 1 and l = 1/2; set allow_recurrent = true to accept this trivial case"
    )]
    RecurrentSite(u64),
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("model file: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Drift,
    Lifetime,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Drift => "drift",
            Role::Lifetime => "lifetime",
        })
    }
}

/// An evaluated parameter; `clipped` is set when a formula left the valid range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub clipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClipEvent {
    pub role: Role,
    pub site: u64,
    pub raw: f64,
    pub clipped_to: f64,
}

/// How many occupied sites fall in a category.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Count {
    Finite(u64),
    Infinite,
    Unknown,
}

impl Count {
    pub fn is_zero(self) -> bool {
        self == Count::Finite(0)
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Count::Infinite) || matches!(self, Count::Finite(k) if k > 0)
    }
}

/// Where the occupied sites' values sit relative to a threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub below: Count,
    pub equal: Count,
    pub above: Count,
    /// Smallest occupied site in each category, when known.
    pub first_below: Option<u64>,
    pub first_equal: Option<u64>,
    pub first_above: Option<u64>,
}

/// A complete model. Immutable once validated.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    name: Option<String>,
    drift: SequenceFamily,
    lifetime: SequenceFamily,
    occupied: Occupancy,
    allow_recurrent: bool,
}

impl ModelSpec {
    pub fn new(
        drift: SequenceFamily,
        lifetime: SequenceFamily,
        occupied: Occupancy,
    ) -> Result<Self, ModelError> {
        let spec = ModelSpec {
            name: None,
            drift,
            lifetime,
            occupied,
            allow_recurrent: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Every site occupied, immortal walkers.
    pub fn immortal(drift: SequenceFamily) -> Result<Self, ModelError> {
        ModelSpec::new(drift, SequenceFamily::constant(1.0), Occupancy::All)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Accept sites with `p = 1` and `l = 1/2`.
    pub fn allowing_recurrent(mut self) -> Result<Self, ModelError> {
        self.allow_recurrent = true;
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn drift(&self) -> &SequenceFamily {
        &self.drift
    }

    pub fn lifetime(&self) -> &SequenceFamily {
        &self.lifetime
    }

    pub fn occupied(&self) -> &Occupancy {
        &self.occupied
    }

    pub fn allow_recurrent(&self) -> bool {
        self.allow_recurrent
    }

    pub fn family(&self, role: Role) -> &SequenceFamily {
        match role {
            Role::Drift => &self.drift,
            Role::Lifetime => &self.lifetime,
        }
    }

    /// `l_n`.
    pub fn eval_drift(&self, n: u64) -> Result<f64, ModelError> {
        self.require_occupied(n)?;
        Ok(self.sample(Role::Drift, n)?.value)
    }

    /// `p_n`.
    pub fn eval_lifetime(&self, n: u64) -> Result<f64, ModelError> {
        self.require_occupied(n)?;
        Ok(self.sample(Role::Lifetime, n)?.value)
    }

    fn require_occupied(&self, n: u64) -> Result<(), ModelError> {
        if self.occupied.contains(n) {
            Ok(())
        } else {
            Err(ModelError::NotOccupied(n))
        }
    }

    /// Value at any site, occupied or not, with clipping reported.
    pub fn sample(&self, role: Role, n: u64) -> Result<Sample, ModelError> {
        let (raw, formula) = self
            .family(role)
            .raw(n)
            .ok_or(ModelError::OutOfDomain { role, site: n })?;
        let (lo, hi) = match role {
            Role::Drift => (LEVEL_EPS, 1.0 - LEVEL_EPS),
            Role::Lifetime => (0.0, 1.0),
        };
        if formula {
            let value = raw.clamp(lo, hi);
            return Ok(Sample {
                value,
                clipped: value != raw,
            });
        }
        let ok = match role {
            Role::Drift => raw > 0.0 && raw < 1.0,
            Role::Lifetime => (0.0..=1.0).contains(&raw),
        };
        if ok {
            Ok(Sample {
                value: raw,
                clipped: false,
            })
        } else {
            Err(ModelError::InvalidValue {
                role,
                site: n,
                value: raw,
            })
        }
    }

    /// Clipping events at occupied sites in `[0, horizon]`.
    pub fn clip_events(&self, horizon: u64) -> Result<Vec<ClipEvent>, ModelError> {
        let mut out = Vec::new();
        for n in self.occupied.sites_up_to(horizon) {
            for role in [Role::Drift, Role::Lifetime] {
                let s = self.sample(role, n)?;
                if s.clipped {
                    out.push(ClipEvent {
                        role,
                        site: n,
                        raw: self.family(role).raw(n).map_or(f64::NAN, |r| r.0),
                        clipped_to: s.value,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Index below which values are checked site by site.
    fn scan_bound(&self) -> u64 {
        let mut bound = 0;
        for (role, thr) in [(Role::Drift, 0.5), (Role::Lifetime, 1.0)] {
            let f = self.family(role);
            let b = match (f.domain_end(), f.settle_index(thr)) {
                (Some(end), _) => end,
                (None, Some(s)) => s,
                (None, None) => SCAN_LIMIT,
            };
            bound = bound.max(b);
        }
        bound.min(SCAN_LIMIT)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for role in [Role::Drift, Role::Lifetime] {
            self.family(role)
                .check_parameters()
                .map_err(|(field, reason)| ModelError::InvalidParameter {
                    field: format!("{role}.{field}"),
                    reason,
                })?;
        }
        self.occupied
            .check()
            .map_err(|reason| ModelError::InvalidParameter {
                field: "occupied".into(),
                reason,
            })?;
        if self.sample(Role::Lifetime, 0)?.value <= 0.0 {
            return Err(ModelError::DeadOrigin);
        }
        let bound = self.scan_bound();
        let explicit = match self.occupied.density() {
            Density::Finite(sites) => sites,
            _ => self.occupied.sites_up_to(bound.saturating_sub(1)),
        };
        for &n in &explicit {
            let l = self.sample(Role::Drift, n)?.value;
            let p = self.sample(Role::Lifetime, n)?.value;
            if !self.allow_recurrent && l == 0.5 && p == 1.0 {
                return Err(ModelError::RecurrentSite(n));
            }
        }
        if !self.allow_recurrent && !matches!(self.occupied.density(), Density::Finite(_)) {
            if let (Some(dt), Some(lt)) = (self.drift.tail(), self.lifetime.tail()) {
                if dt.relation(0.5) == Ordering::Equal && lt.relation(1.0) == Ordering::Equal {
                    let site = self.occupied.sites_up_to(bound.max(1) * 2).last().copied();
                    return Err(ModelError::RecurrentSite(site.unwrap_or(bound)));
                }
            }
        }
        Ok(())
    }

    /// Position of `role` values at occupied sites relative to `threshold`.
    pub fn profile(&self, role: Role, threshold: f64) -> Profile {
        let family = self.family(role);
        let mut counts = [0u64; 3];
        let mut firsts: [Option<u64>; 3] = [None; 3];
        let slot = |o: Ordering| match o {
            Ordering::Less => 0,
            Ordering::Equal => 1,
            Ordering::Greater => 2,
        };
        let mut record = |n: u64, v: f64, counts: &mut [u64; 3]| {
            let i = slot(v.total_cmp(&threshold));
            counts[i] += 1;
            firsts[i].get_or_insert(n);
        };
        let finish =
            |counts: [u64; 3], firsts: [Option<u64>; 3], tail: Option<Ordering>, complete: bool| {
                let mut c = counts.map(|k| {
                    if complete {
                        Count::Finite(k)
                    } else {
                        Count::Unknown
                    }
                });
                if let Some(o) = tail {
                    c[slot(o)] = Count::Infinite;
                }
                Profile {
                    below: c[0],
                    equal: c[1],
                    above: c[2],
                    first_below: firsts[0],
                    first_equal: firsts[1],
                    first_above: firsts[2],
                }
            };
        if let Density::Finite(sites) = self.occupied.density() {
            let mut complete = true;
            for n in sites {
                match self.sample(role, n) {
                    Ok(s) => record(n, s.value, &mut counts),
                    Err(_) => complete = false,
                }
            }
            return finish(counts, firsts, None, complete);
        }
        let settle = family.settle_index(threshold);
        let tail = family.tail();
        let bound = settle.unwrap_or(SCAN_LIMIT).min(SCAN_LIMIT);
        let mut complete = settle.is_some_and(|s| s <= SCAN_LIMIT) && tail.is_some();
        for n in self.occupied.sites_up_to(bound.saturating_sub(1)) {
            if bound == 0 {
                break;
            }
            match self.sample(role, n) {
                Ok(s) => record(n, s.value, &mut counts),
                Err(_) => complete = false,
            }
        }
        let tail_rel = tail.map(|t| t.relation(threshold));
        if complete {
            if let Some(o) = tail_rel {
                let first_tail = self
                    .occupied
                    .sites_up_to(bound.max(1) * 2 + 2)
                    .into_iter()
                    .find(|&n| n >= bound);
                let i = slot(o);
                if firsts[i].is_none() {
                    firsts[i] = first_tail;
                }
            }
        }
        finish(counts, firsts, tail_rel, complete)
    }

    /// Whether `l_n`, `p_n` at occupied sites are eventually described by tail
    /// rules (false for finite tables with infinitely many occupied sites).
    pub fn has_tails(&self) -> bool {
        self.drift.tail().is_some() && self.lifetime.tail().is_some()
    }

    /// First occupied site whose walker is immortal with `l = 1/2`. Always
    /// `None` unless the model opted into recurrent sites.
    pub fn recurrent_site(&self) -> Option<u64> {
        if !self.allow_recurrent {
            return None;
        }
        let bound = self.scan_bound();
        let explicit = match self.occupied.density() {
            Density::Finite(sites) => sites,
            _ => self.occupied.sites_up_to(bound.saturating_sub(1)),
        };
        let recurrent = |n: u64| {
            matches!(self.sample(Role::Drift, n), Ok(s) if s.value == 0.5)
                && matches!(self.sample(Role::Lifetime, n), Ok(s) if s.value == 1.0)
        };
        if let Some(n) = explicit.iter().copied().find(|&n| recurrent(n)) {
            return Some(n);
        }
        if matches!(self.occupied.density(), Density::Finite(_)) {
            return None;
        }
        let (dt, lt) = (self.drift.tail()?, self.lifetime.tail()?);
        if dt.relation(0.5) == Ordering::Equal && lt.relation(1.0) == Ordering::Equal {
            return self
                .occupied
                .sites_up_to(bound.max(1) * 2 + 2)
                .into_iter()
                .find(|&n| n >= bound);
        }
        None
    }

    /// Parse a model file.
    pub fn from_toml_str(s: &str) -> Result<Self, ModelError> {
        let file: ModelFile = toml::from_str(s).map_err(|e| ModelError::Parse(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(ModelError::Parse(format!(
                "unsupported format `{}` (expected `{MODEL_FORMAT}`)",
                file.format
            )));
        }
        let spec = ModelSpec {
            name: file.name,
            drift: file.drift,
            lifetime: file.lifetime,
            occupied: file.occupied,
            allow_recurrent: file.allow_recurrent,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            name: self.name.clone(),
            allow_recurrent: self.allow_recurrent,
            drift: self.drift.clone(),
            lifetime: self.lifetime.clone(),
            occupied: self.occupied.clone(),
        };
        toml::to_string(&file).expect("model specs always serialize")
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))?;
        ModelSpec::from_toml_str(&text)
            .map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    allow_recurrent: bool,
    drift: SequenceFamily,
    lifetime: SequenceFamily,
    occupied: Occupancy,
}

//! Finite-horizon Monte Carlo of the frog model.
//!
//! Time is discrete and updates are synchronous. A dormant walker woken at
//! tick `t` (some active walker stands on its site at the end of tick `t`)
//! makes its first move at tick `t + 1`. Each walker draws from its own random
//! stream keyed by `(trial seed, home site)`: per step one uniform decides
//! survival (`u < p`) and a second the direction (`u < l` is left). Paths are
//! therefore independent of activation times and of update order, which is
//! what the firework coupling and the monotonicity harness rely on.

mod coupling;
mod estimate;
mod generation;
mod scenario;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelSpec, Role};
use crate::rng::{self, Stream};

pub use coupling::{
    coupled_activation_times, coupled_frog_firework, firework_from_paths, run_firework_trial,
    ActivationTimes, CoupledOutcome, FireworkTrial,
};
pub use estimate::{
    estimate, estimate_infinite_activation_proxy, estimate_local_survival_proxy, horizon_doubling,
    per_site_origin_frequency, run_replications, write_trials_csv, EstimateReport, Proxy,
    SiteFrequency, TRIALS_FORMAT,
};
pub use generation::{generation_chain_diagnostic, ChainTrial, GenerationReport, GenerationStep};
pub use scenario::{scenario, SCENARIOS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn default_front_fraction() -> f64 {
    0.9
}

/// Horizons, replication count and seed of a simulation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Largest site simulated; walkers leaving `[−H, H]` are removed.
    pub site_horizon: u64,
    pub time_horizon: u64,
    pub replications: u64,
    pub rng_seed: u64,
    /// `K` in the local-survival proxy `origin_visits ≥ K`.
    pub origin_visit_target: u64,
    #[serde(default)]
    pub record_trajectory: bool,
    /// Maximum steps any single walker takes; `None` means no cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walker_step_cap: Option<u64>,
    /// Infinite-activation proxy: `rightmost_activated ≥ ρ·H`.
    #[serde(default = "default_front_fraction")]
    pub front_fraction: f64,
}

/// Sites above this are refused: per-site tables are allocated up front.
const MAX_SITE_HORIZON: u64 = 50_000_000;

impl SimConfig {
    pub fn new(site_horizon: u64, time_horizon: u64, replications: u64, rng_seed: u64) -> Self {
        SimConfig {
            site_horizon,
            time_horizon,
            replications,
            rng_seed,
            origin_visit_target: 1,
            record_trajectory: false,
            walker_step_cap: None,
            front_fraction: default_front_fraction(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.site_horizon == 0 || self.time_horizon == 0 {
            return Err(SimError::Config("horizons must be positive".into()));
        }
        if self.site_horizon > MAX_SITE_HORIZON {
            return Err(SimError::Resource(format!(
                "site horizon {} exceeds {MAX_SITE_HORIZON}",
                self.site_horizon
            )));
        }
        if self.origin_visit_target == 0 {
            return Err(SimError::Config(
                "origin_visit_target must be at least 1".into(),
            ));
        }
        if !(self.front_fraction > 0.0 && self.front_fraction <= 1.0) {
            return Err(SimError::Config("front_fraction must lie in (0, 1]".into()));
        }
        if self.walker_step_cap == Some(0) {
            return Err(SimError::Config("walker_step_cap must be positive".into()));
        }
        Ok(())
    }
}

/// Where a walker is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Position {
    At(i64),
    Dead,
    /// Left `[−H, H]` or reached its step cap; no longer simulated.
    Removed(i64),
}

/// Snapshot of one walker, kept when trajectories are recorded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkerState {
    pub site_index: u64,
    pub position: Position,
    pub activation_time: Option<u64>,
    pub steps_taken: u64,
}

/// Summary of one replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub activated_count: u64,
    pub rightmost_activated: u64,
    /// Visits to site 0 after time 0, by any walker.
    pub origin_visits: u64,
    /// Tick at which the last walker died, if every activated walker died.
    pub all_dead_time: Option<u64>,
    pub hit_site_horizon: bool,
    pub hit_time_horizon: bool,
    /// Some walker stopped at its step cap while alive.
    pub hit_step_cap: bool,
    /// Home sites of walkers that visited 0 at least once (ascending).
    pub origin_visitors: Vec<u64>,
    /// Final walker states in site order, when trajectories are recorded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkers: Option<Vec<WalkerState>>,
}

impl TrialRecord {
    /// Activation times by site, from the recorded walkers.
    pub fn activation_times(&self) -> Option<Vec<(u64, Option<u64>)>> {
        self.walkers.as_ref().map(|w| {
            w.iter()
                .map(|s| (s.site_index, s.activation_time))
                .collect()
        })
    }
}

/// Law of one walker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Params {
    pub p: f64,
    pub l: f64,
}

/// One step of a walker: `None` when it dies, otherwise `±1`.
#[inline]
pub(crate) fn step(rng: &mut Stream, law: Params) -> Option<i64> {
    let u_d: f64 = rng.random();
    if u_d >= law.p {
        return None;
    }
    let u_m: f64 = rng.random();
    Some(if u_m < law.l { -1 } else { 1 })
}

/// Participating walkers within the site horizon, evaluated once and shared
/// by every trial of a run.
#[derive(Clone, Debug)]
pub struct Simulator {
    cfg: SimConfig,
    /// Indexed by site; `None` for empty sites and `p = 0` walkers.
    params: Vec<Option<Params>>,
}

struct Active {
    site: u64,
    pos: i64,
    steps: u64,
    law: Params,
    rng: Stream,
    visited_origin: bool,
}

#[derive(Clone, Copy)]
struct Slot {
    activation: Option<u64>,
    final_pos: Position,
    steps: u64,
}

impl Simulator {
    pub fn new(spec: &ModelSpec, cfg: &SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let h = cfg.site_horizon;
        let mut params = vec![None; h as usize + 1];
        for n in spec.occupied().sites_up_to(h) {
            let p = spec.sample(Role::Lifetime, n)?.value;
            let l = spec.sample(Role::Drift, n)?.value;
            if p > 0.0 {
                params[n as usize] = Some(Params { p, l });
            }
        }
        Ok(Simulator {
            cfg: cfg.clone(),
            params,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub(crate) fn params(&self, site: u64) -> Option<Params> {
        self.params.get(site as usize).copied().flatten()
    }

    /// Replication `trial` of the run.
    pub fn run(&self, trial: u64) -> TrialRecord {
        self.run_seeded(trial, rng::derive_seed(self.cfg.rng_seed, trial))
    }

    pub fn run_seeded(&self, trial: u64, seed: u64) -> TrialRecord {
        let h = self.cfg.site_horizon as i64;
        let cap = self.cfg.walker_step_cap.unwrap_or(u64::MAX);
        let record = self.cfg.record_trajectory;
        let mut slots: Vec<Slot> = if record {
            vec![
                Slot {
                    activation: None,
                    final_pos: Position::Dead,
                    steps: 0,
                };
                self.params.len()
            ]
        } else {
            Vec::new()
        };
        let mut dormant: Vec<bool> = self.params.iter().map(Option::is_some).collect();
        let mut rec = TrialRecord {
            trial,
            seed,
            activated_count: 0,
            rightmost_activated: 0,
            origin_visits: 0,
            all_dead_time: None,
            hit_site_horizon: false,
            hit_time_horizon: false,
            hit_step_cap: false,
            origin_visitors: Vec::new(),
            walkers: None,
        };
        let mut active: Vec<Active> = Vec::new();
        let mut woken: Vec<u64> = Vec::new();
        let mut removed_any = false;

        let wake = |site: u64,
                    t: u64,
                    dormant: &mut Vec<bool>,
                    slots: &mut Vec<Slot>,
                    rec: &mut TrialRecord,
                    out: &mut Vec<u64>| {
            dormant[site as usize] = false;
            rec.activated_count += 1;
            rec.rightmost_activated = rec.rightmost_activated.max(site);
            if record {
                slots[site as usize].activation = Some(t);
            }
            out.push(site);
        };
        let origin = self.params(0).expect("the origin walker has p_0 > 0");
        wake(0, 0, &mut dormant, &mut slots, &mut rec, &mut woken);
        debug_assert!(origin.p > 0.0);

        let mut t: u64 = 0;
        loop {
            woken.sort_unstable();
            for site in woken.drain(..) {
                active.push(Active {
                    site,
                    pos: site as i64,
                    steps: 0,
                    law: self.params[site as usize].expect("only participating sites wake"),
                    rng: rng::stream(seed, site),
                    visited_origin: false,
                });
            }
            if active.is_empty() {
                if !removed_any {
                    rec.all_dead_time = Some(t);
                }
                break;
            }
            if t >= self.cfg.time_horizon {
                rec.hit_time_horizon = true;
                break;
            }
            t += 1;
            let mut i = 0;
            while i < active.len() {
                let w = &mut active[i];
                let outcome = match step(&mut w.rng, w.law) {
                    None => Some(Position::Dead),
                    Some(d) => {
                        w.pos += d;
                        w.steps += 1;
                        if w.pos == 0 {
                            rec.origin_visits += 1;
                            if !w.visited_origin {
                                w.visited_origin = true;
                                rec.origin_visitors.push(w.site);
                            }
                        } else if w.pos > 0 && w.pos <= h && dormant[w.pos as usize] {
                            wake(
                                w.pos as u64,
                                t,
                                &mut dormant,
                                &mut slots,
                                &mut rec,
                                &mut woken,
                            );
                        }
                        if w.pos > h || w.pos < -h {
                            rec.hit_site_horizon = true;
                            Some(Position::Removed(w.pos))
                        } else if w.steps >= cap {
                            rec.hit_step_cap = true;
                            Some(Position::Removed(w.pos))
                        } else {
                            None
                        }
                    }
                };
                match outcome {
                    Some(end) => {
                        if matches!(end, Position::Removed(_)) {
                            removed_any = true;
                        }
                        let w = active.swap_remove(i);
                        if record {
                            let s = &mut slots[w.site as usize];
                            s.final_pos = end;
                            s.steps = w.steps;
                        }
                    }
                    None => i += 1,
                }
            }
        }
        rec.origin_visitors.sort_unstable();
        if record {
            for w in &active {
                let s = &mut slots[w.site as usize];
                s.final_pos = Position::At(w.pos);
                s.steps = w.steps;
            }
            for site in woken {
                slots[site as usize].final_pos = Position::At(site as i64);
            }
            let walkers = self
                .params
                .iter()
                .enumerate()
                .filter(|(_, p)| p.is_some())
                .map(|(n, _)| {
                    let s = slots[n];
                    WalkerState {
                        site_index: n as u64,
                        position: if s.activation.is_some() {
                            s.final_pos
                        } else {
                            Position::At(n as i64)
                        },
                        activation_time: s.activation,
                        steps_taken: s.steps,
                    }
                })
                .collect();
            rec.walkers = Some(walkers);
        }
        rec
    }
}

/// One replication of `spec` under `cfg` with an explicit trial seed.
pub fn run_trial(
    spec: &ModelSpec,
    cfg: &SimConfig,
    trial_seed: u64,
) -> Result<TrialRecord, SimError> {
    Ok(Simulator::new(spec, cfg)?.run_seeded(0, trial_seed))
}

//! Firework process and couplings with the frog process.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;

use crate::analytics::{first_passage_right, StepLaw};
use crate::model::ModelSpec;
use crate::rng;

use super::{step, Params, SimConfig, SimError, Simulator};

/// Sites activated by one firework replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FireworkTrial {
    pub activated_count: u64,
    pub rightmost_activated: u64,
    /// The radius union reached past the site horizon.
    pub hit_site_horizon: bool,
}

/// `P(R ≥ k) = ρ^k` for the rightmost excursion of a walker with law `law`.
pub(super) fn sample_radius<R: Rng + ?Sized>(law: Params, rng: &mut R) -> Option<u64> {
    let rho = StepLaw::new(law.p, law.l).map(first_passage_right).ok()?;
    if rho >= 1.0 {
        return None;
    }
    // number of failures before the first success, P(X ≥ k) = rho^k
    Some(Geometric::new(1.0 - rho).ok()?.sample(rng))
}

/// Greedy activation: site `i` is reached when some activated `k < i` has
/// `k + R_k ≥ i`. `None` radii are infinite.
fn spread(
    sim: &Simulator,
    mut radius_of: impl FnMut(u64, Params) -> Option<u64>,
) -> (Vec<u64>, bool) {
    let h = sim.config().site_horizon;
    let mut activated = vec![0];
    let origin = sim.params(0).expect("origin participates");
    let mut reach = radius_of(0, origin).map_or(u64::MAX, |r| r);
    let mut site = 1;
    while site <= h && site <= reach {
        if let Some(law) = sim.params(site) {
            activated.push(site);
            let r = radius_of(site, law).map_or(u64::MAX, |r| site.saturating_add(r));
            reach = reach.max(r);
        }
        site += 1;
    }
    (activated, reach > h)
}

/// Firework replication with exactly sampled radii.
pub fn run_firework_trial(
    spec: &ModelSpec,
    cfg: &SimConfig,
    trial_seed: u64,
) -> Result<FireworkTrial, SimError> {
    let sim = Simulator::new(spec, cfg)?;
    let (activated, beyond) = spread(&sim, |site, law| {
        sample_radius(law, &mut rng::stream(trial_seed, site))
    });
    Ok(FireworkTrial {
        activated_count: activated.len() as u64,
        rightmost_activated: *activated.last().expect("origin is always activated"),
        hit_site_horizon: beyond,
    })
}

/// Rightmost excursion of walker `site` along the same path the frog engine
/// would follow, stopped by the same rules (death, leaving `[−H, H]`, step cap).
fn path_radius(
    sim: &Simulator,
    seed: u64,
    site: u64,
    law: Params,
    censored: &mut bool,
) -> Option<u64> {
    let h = sim.config().site_horizon as i64;
    let cap = sim.config().walker_step_cap.unwrap_or(u64::MAX);
    let mut rng = rng::stream(seed, site);
    let start = site as i64;
    let (mut pos, mut top, mut steps) = (start, start, 0u64);
    while let Some(d) = step(&mut rng, law) {
        pos += d;
        steps += 1;
        top = top.max(pos);
        if pos > h || pos < -h {
            break;
        }
        if steps >= cap {
            *censored = true;
            break;
        }
    }
    Some((top - start) as u64)
}

/// Activated sites of the firework process built from the frog walkers' own
/// paths.
pub fn firework_from_paths(sim: &Simulator, seed: u64) -> (Vec<u64>, bool) {
    let mut censored = false;
    let (activated, _) = spread(sim, |site, law| {
        path_radius(sim, seed, site, law, &mut censored)
    });
    (activated, censored)
}

/// Frog and firework activation sets under shared paths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoupledOutcome {
    pub frog: Vec<u64>,
    pub firework: Vec<u64>,
    /// Some walker was stopped by its step cap.
    pub censored: bool,
}

impl CoupledOutcome {
    pub fn agree(&self) -> bool {
        self.frog == self.firework
    }
}

/// Run the frog model to completion (each walker capped at
/// `walker_step_cap`, defaulting to `time_horizon` steps) and the firework
/// process on the same paths. The two activation sets coincide.
pub fn coupled_frog_firework(
    spec: &ModelSpec,
    cfg: &SimConfig,
    trial_seed: u64,
) -> Result<CoupledOutcome, SimError> {
    let mut cfg = cfg.clone();
    cfg.walker_step_cap = Some(cfg.walker_step_cap.unwrap_or(cfg.time_horizon));
    cfg.time_horizon = u64::MAX;
    cfg.record_trajectory = true;
    let sim = Simulator::new(spec, &cfg)?;
    let rec = sim.run_seeded(0, trial_seed);
    let frog = rec
        .walkers
        .expect("trajectory recorded")
        .iter()
        .filter(|w| w.activation_time.is_some())
        .map(|w| w.site_index)
        .collect();
    let (firework, censored) = firework_from_paths(&sim, trial_seed);
    Ok(CoupledOutcome {
        frog,
        firework,
        censored: censored || rec.hit_step_cap,
    })
}

/// Activation time of each site `0..=H`, `None` if never activated.
pub type ActivationTimes = Vec<Option<u64>>;

/// Activation times of the same trial under two lifetime sequences that share
/// drifts and random streams. When `p_n` increases pointwise from `low` to
/// `high`, every site is activated no later under `high`.
pub fn coupled_activation_times(
    low: &ModelSpec,
    high: &ModelSpec,
    cfg: &SimConfig,
    trial_seed: u64,
) -> Result<(ActivationTimes, ActivationTimes), SimError> {
    let mut cfg = cfg.clone();
    cfg.record_trajectory = true;
    let h = cfg.site_horizon;
    let times = |spec: &ModelSpec| -> Result<ActivationTimes, SimError> {
        let rec = Simulator::new(spec, &cfg)?.run_seeded(0, trial_seed);
        let mut out = vec![None; h as usize + 1];
        for w in rec.walkers.expect("trajectory recorded") {
            out[w.site_index as usize] = w.activation_time;
        }
        Ok(out)
    };
    Ok((times(low)?, times(high)?))
}

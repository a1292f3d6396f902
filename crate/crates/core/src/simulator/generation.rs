//! Generation chain of the firework process.
//!
//! Generation 0 is the origin. Generation `k + 1` is every site newly reached
//! by the radii of generation `k`; the chain is absorbed at the first empty
//! generation. Radii are sampled exactly from `P(R ≥ k) = ρ^k`.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{absorption_product, first_passage_right, StepLaw};
use crate::model::{ModelSpec, SequenceFamily};
use crate::rng;

use super::coupling::sample_radius;
use super::{SimConfig, SimError, Simulator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationStep {
    pub generation: u64,
    /// Walkers activated in this generation.
    pub generation_size: u64,
    pub rightmost: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainTrial {
    pub steps: Vec<GenerationStep>,
    /// Index of the first empty generation.
    pub absorbed_at: Option<u64>,
    pub hit_site_horizon: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationReport {
    pub trials: u64,
    pub absorbed: u64,
    pub hit_site_horizon: u64,
    /// Fraction of non-empty generations whose successor is empty.
    pub absorption_frequency: f64,
    /// `∏_{i≥1}(1 − ρ^i)` when every walker has the same law.
    pub absorption_bound: Option<f64>,
    pub late_after: u64,
    /// Fraction of trials with a new activation after generation `late_after`.
    pub late_activation_fraction: f64,
    /// Per-trial chains, kept when trajectories are recorded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<Vec<ChainTrial>>,
}

fn chain(sim: &Simulator, seed: u64, max_generations: u64) -> ChainTrial {
    let h = sim.config().site_horizon;
    let radius = |site: u64| {
        let law = sim.params(site).expect("participating site");
        sample_radius(law, &mut rng::stream(seed, site))
            .map_or(u64::MAX, |r| site.saturating_add(r))
    };
    let mut current = vec![0u64];
    let mut rightmost = 0u64;
    let mut out = ChainTrial {
        steps: vec![GenerationStep {
            generation: 0,
            generation_size: 1,
            rightmost: 0,
        }],
        absorbed_at: None,
        hit_site_horizon: false,
    };
    for generation in 1..=max_generations {
        let reach = current
            .iter()
            .map(|&s| radius(s))
            .max()
            .unwrap_or(0)
            .max(rightmost);
        let top = reach.min(h);
        let next: Vec<u64> = (rightmost + 1..=top)
            .filter(|&s| sim.params(s).is_some())
            .collect();
        if reach > h {
            out.hit_site_horizon = true;
        }
        rightmost = top;
        if next.is_empty() {
            out.absorbed_at = Some(generation);
            break;
        }
        out.steps.push(GenerationStep {
            generation,
            generation_size: next.len() as u64,
            rightmost,
        });
        if out.hit_site_horizon {
            break;
        }
        current = next;
    }
    out
}

fn homogeneous_ratio(spec: &ModelSpec) -> Option<f64> {
    match (spec.drift(), spec.lifetime()) {
        (SequenceFamily::Constant { value: l }, SequenceFamily::Constant { value: p }) => {
            StepLaw::new(*p, *l).ok().map(first_passage_right)
        }
        _ => None,
    }
}

/// Run `cfg.replications` chains of at most `cfg.time_horizon` generations.
pub fn generation_chain_diagnostic(
    spec: &ModelSpec,
    cfg: &SimConfig,
    late_after: u64,
) -> Result<GenerationReport, SimError> {
    let sim = Simulator::new(spec, cfg)?;
    let chains: Vec<ChainTrial> = (0..cfg.replications)
        .into_par_iter()
        .map(|t| chain(&sim, rng::derive_seed(cfg.rng_seed, t), cfg.time_horizon))
        .collect();
    let (mut nonempty, mut absorbing) = (0u64, 0u64);
    for c in &chains {
        nonempty += c.steps.len() as u64;
        absorbing += u64::from(c.absorbed_at.is_some());
    }
    let late = chains
        .iter()
        .filter(|c| c.steps.last().is_some_and(|s| s.generation > late_after))
        .count();
    let trials = chains.len() as u64;
    let frac = |k: u64| {
        if trials == 0 {
            f64::NAN
        } else {
            k as f64 / trials as f64
        }
    };
    Ok(GenerationReport {
        trials,
        absorbed: absorbing,
        hit_site_horizon: chains.iter().filter(|c| c.hit_site_horizon).count() as u64,
        absorption_frequency: if nonempty == 0 {
            f64::NAN
        } else {
            absorbing as f64 / nonempty as f64
        },
        absorption_bound: homogeneous_ratio(spec)
            .filter(|&r| r < 1.0)
            .and_then(|r| absorption_product(r, 1e-15).ok())
            .map(|(v, _)| v),
        late_after,
        late_activation_fraction: frac(late as u64),
        chains: cfg.record_trajectory.then_some(chains),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_drift_chain_absorbs() {
        let spec = ModelSpec::immortal(SequenceFamily::constant(0.6)).unwrap();
        let cfg = SimConfig::new(100_000, 1_000, 2_000, 4);
        let r = generation_chain_diagnostic(&spec, &cfg, 50).unwrap();
        assert_eq!(r.absorbed, r.trials);
        let bound = r.absorption_bound.unwrap();
        assert!(
            r.absorption_frequency >= bound,
            "{} < {bound}",
            r.absorption_frequency
        );
        assert!(r.late_activation_fraction < 0.01);
    }

    #[test]
    fn right_drift_chain_escapes() {
        let spec = ModelSpec::immortal(SequenceFamily::constant(0.4)).unwrap();
        let cfg = SimConfig::new(500, 1_000, 20, 4);
        let r = generation_chain_diagnostic(&spec, &cfg, 50).unwrap();
        assert_eq!(r.hit_site_horizon, 20);
        assert_eq!(r.absorbed, 0);
        assert_eq!(r.absorption_bound, None);
    }
}

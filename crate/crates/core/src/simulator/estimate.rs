//! Replication drivers, proxy estimators and trial output.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::model::ModelSpec;

use super::{SimConfig, SimError, Simulator, TrialRecord};

/// Schema tag written at the top of trial CSV files.
pub const TRIALS_FORMAT: &str = "frogwalk-trials/1";

/// Every replication of the run, in trial order.
pub fn run_replications(spec: &ModelSpec, cfg: &SimConfig) -> Result<Vec<TrialRecord>, SimError> {
    let sim = Simulator::new(spec, cfg)?;
    Ok((0..cfg.replications)
        .into_par_iter()
        .map(|t| sim.run(t))
        .collect())
}

/// Which finite-horizon event a run estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Proxy {
    /// `origin_visits ≥ K`.
    LocalSurvival,
    /// `rightmost_activated ≥ ρ·H`.
    InfiniteActivation,
}

impl Proxy {
    pub fn holds(self, cfg: &SimConfig, r: &TrialRecord) -> bool {
        match self {
            Proxy::LocalSurvival => r.origin_visits >= cfg.origin_visit_target,
            Proxy::InfiniteActivation => {
                r.rightmost_activated as f64 >= cfg.front_fraction * cfg.site_horizon as f64
            }
        }
    }
}

/// A binomial proportion over replications. These are finite-horizon proxies
/// of the limiting events, not the limiting probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub proxy: Proxy,
    pub estimate: f64,
    pub std_error: f64,
    pub successes: u64,
    pub replications: u64,
    /// Trials cut short by the time horizon.
    pub hit_time_horizon: u64,
    /// Trials in which some walker left `[−H, H]`.
    pub hit_site_horizon: u64,
    pub config: SimConfig,
}

impl EstimateReport {
    /// Proportion of `records` in which `proxy` holds.
    pub fn from_records(proxy: Proxy, cfg: &SimConfig, records: &[TrialRecord]) -> EstimateReport {
        let n = records.len() as u64;
        let successes = records.iter().filter(|r| proxy.holds(cfg, r)).count() as u64;
        let (estimate, std_error) = if n == 0 {
            (f64::NAN, f64::NAN)
        } else {
            // sample standard deviation over √n
            let q = successes as f64 / n as f64;
            let var = if n > 1 {
                q * (1.0 - q) * n as f64 / (n - 1) as f64
            } else {
                0.0
            };
            (q, (var / n as f64).sqrt())
        };
        EstimateReport {
            proxy,
            estimate,
            std_error,
            successes,
            replications: n,
            hit_time_horizon: records.iter().filter(|r| r.hit_time_horizon).count() as u64,
            hit_site_horizon: records.iter().filter(|r| r.hit_site_horizon).count() as u64,
            config: cfg.clone(),
        }
    }
}

pub fn estimate(
    spec: &ModelSpec,
    cfg: &SimConfig,
    proxy: Proxy,
) -> Result<EstimateReport, SimError> {
    let records = run_replications(spec, cfg)?;
    Ok(EstimateReport::from_records(proxy, cfg, &records))
}

pub fn estimate_local_survival_proxy(
    spec: &ModelSpec,
    cfg: &SimConfig,
) -> Result<EstimateReport, SimError> {
    estimate(spec, cfg, Proxy::LocalSurvival)
}

pub fn estimate_infinite_activation_proxy(
    spec: &ModelSpec,
    cfg: &SimConfig,
) -> Result<EstimateReport, SimError> {
    estimate(spec, cfg, Proxy::InfiniteActivation)
}

/// The same estimate with both horizons doubled `doublings` times. A proxy
/// that keeps moving as the horizons grow has not converged.
pub fn horizon_doubling(
    spec: &ModelSpec,
    cfg: &SimConfig,
    proxy: Proxy,
    doublings: u32,
) -> Result<Vec<EstimateReport>, SimError> {
    (0..=doublings)
        .map(|k| {
            let mut c = cfg.clone();
            c.site_horizon = cfg.site_horizon.checked_shl(k).unwrap_or(u64::MAX);
            c.time_horizon = cfg.time_horizon.checked_shl(k).unwrap_or(u64::MAX);
            estimate(spec, &c, proxy)
        })
        .collect()
}

/// Empirical `P(walker n visits 0 | walker n activated)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteFrequency {
    pub site: u64,
    pub activations: u64,
    pub visits: u64,
    pub frequency: f64,
    pub std_error: f64,
}

/// Per-site origin-visit frequencies for sites `1..=max_site`.
pub fn per_site_origin_frequency(
    spec: &ModelSpec,
    cfg: &SimConfig,
    max_site: u64,
) -> Result<Vec<SiteFrequency>, SimError> {
    let mut cfg = cfg.clone();
    cfg.record_trajectory = true;
    let sim = Simulator::new(spec, &cfg)?;
    let m = max_site.min(cfg.site_horizon) as usize;
    let zero = || (vec![0u64; m + 1], vec![0u64; m + 1]);
    let (act, vis) = (0..cfg.replications)
        .into_par_iter()
        .fold(zero, |(mut act, mut vis), t| {
            let r = sim.run(t);
            for w in r.walkers.as_deref().unwrap_or_default() {
                let n = w.site_index as usize;
                if n <= m && w.activation_time.is_some() {
                    act[n] += 1;
                }
            }
            for &n in &r.origin_visitors {
                if (n as usize) <= m {
                    vis[n as usize] += 1;
                }
            }
            (act, vis)
        })
        .reduce(zero, |(mut a, mut v), (b, w)| {
            for i in 0..=m {
                a[i] += b[i];
                v[i] += w[i];
            }
            (a, v)
        });
    Ok((1..=m)
        .filter(|&n| act[n] > 0)
        .map(|n| {
            let q = vis[n] as f64 / act[n] as f64;
            SiteFrequency {
                site: n as u64,
                activations: act[n],
                visits: vis[n],
                frequency: q,
                std_error: (q * (1.0 - q) / act[n] as f64).sqrt(),
            }
        })
        .collect())
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// One row per trial after a `# frogwalk-trials/1` line.
pub fn write_trials_csv<W: Write>(
    records: &[TrialRecord],
    mut out: W,
) -> Result<(), std::io::Error> {
    writeln!(out, "# {TRIALS_FORMAT}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "seed",
        "activated_count",
        "rightmost_activated",
        "origin_visits",
        "all_dead_time",
        "hit_site_horizon",
        "hit_time_horizon",
        "hit_step_cap",
    ])?;
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.activated_count.to_string(),
            r.rightmost_activated.to_string(),
            r.origin_visits.to_string(),
            opt(r.all_dead_time),
            r.hit_site_horizon.to_string(),
            r.hit_time_horizon.to_string(),
            r.hit_step_cap.to_string(),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SequenceFamily;

    #[test]
    fn right_drift_site_frequencies() {
        // immortal, l = 0.3: a walker at n returns to 0 with probability (3/7)^n
        let spec = ModelSpec::immortal(SequenceFamily::constant(0.3)).unwrap();
        let cfg = SimConfig::new(30, 10_000, 4_000, 17);
        let freq = per_site_origin_frequency(&spec, &cfg, 3).unwrap();
        assert_eq!(freq.len(), 3);
        for f in freq {
            let exact = (3.0f64 / 7.0).powi(f.site as i32);
            assert!(
                (f.frequency - exact).abs() < 4.0 * f.std_error.max(1e-3),
                "{f:?}"
            );
        }
    }

    #[test]
    fn csv_schema() {
        let spec = ModelSpec::immortal(SequenceFamily::constant(0.45)).unwrap();
        let cfg = SimConfig::new(20, 50, 3, 1);
        let recs = run_replications(&spec, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trials_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# frogwalk-trials/1");
        assert!(lines[1].starts_with("trial,seed,"));
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn doubling_reports_each_horizon() {
        let spec = ModelSpec::immortal(SequenceFamily::constant(0.45)).unwrap();
        let cfg = SimConfig::new(20, 100, 50, 1);
        let reps = horizon_doubling(&spec, &cfg, Proxy::LocalSurvival, 2).unwrap();
        let horizons: Vec<u64> = reps.iter().map(|r| r.config.site_horizon).collect();
        assert_eq!(horizons, vec![20, 40, 80]);
    }
}

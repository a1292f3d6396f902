use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use frogwalk::analytics::prob_visit_origin_given_active;
use frogwalk::simulator::{
    horizon_doubling, per_site_origin_frequency, run_replications, write_trials_csv,
    EstimateReport, Proxy, SimConfig, Simulator,
};
use serde_json::json;

use crate::{write_json, ModelArgs};

pub const REPORT_FORMAT: &str = "frogwalk-sim-report/1";

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Simulation config (TOML with the SimConfig fields); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    site_horizon: Option<u64>,
    #[arg(long)]
    time_horizon: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// K in the local-survival proxy `origin visits ≥ K`.
    #[arg(long)]
    visits: Option<u64>,
    #[arg(long)]
    step_cap: Option<u64>,
    /// Sites covered by sites.csv.
    #[arg(long, default_value_t = 10)]
    sites: u64,
    /// Also rerun with both horizons doubled this many times.
    #[arg(long, default_value_t = 0)]
    doublings: u32,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

impl SimulateArgs {
    fn config(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("{}", path.display()))?
            }
            None => SimConfig::new(200, 2_000, 1_000, 1),
        };
        let set = |field: &mut u64, v: Option<u64>| {
            if let Some(v) = v {
                *field = v;
            }
        };
        set(&mut cfg.site_horizon, self.site_horizon);
        set(&mut cfg.time_horizon, self.time_horizon);
        set(&mut cfg.replications, self.replications);
        set(&mut cfg.rng_seed, self.seed);
        set(&mut cfg.origin_visit_target, self.visits);
        if self.step_cap.is_some() {
            cfg.walker_step_cap = self.step_cap;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let spec = args.model.load()?;
    let cfg = args.config()?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let path = |name: &str| args.out_dir.join(name);

    let records = run_replications(&spec, &cfg)?;
    let file = fs::File::create(path("trials.csv"))?;
    write_trials_csv(&records, std::io::BufWriter::new(file))?;

    let local = EstimateReport::from_records(Proxy::LocalSurvival, &cfg, &records);
    let activation = EstimateReport::from_records(Proxy::InfiniteActivation, &cfg, &records);

    // per-site visit frequencies next to the exact single-walker value
    let freqs = per_site_origin_frequency(&spec, &cfg, args.sites)?;
    let mut out = std::io::BufWriter::new(fs::File::create(path("sites.csv"))?);
    writeln!(out, "site,activations,visits,frequency,std_error,analytic")?;
    for f in &freqs {
        let exact = prob_visit_origin_given_active(&spec, f.site)?;
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6}",
            f.site, f.activations, f.visits, f.frequency, f.std_error, exact
        )?;
    }
    out.flush()?;

    // activation front of the first trial
    let mut traced = cfg.clone();
    traced.record_trajectory = true;
    let first = Simulator::new(&spec, &traced)?.run(0);
    let mut times: Vec<(u64, u64)> = first
        .activation_times()
        .unwrap_or_default()
        .into_iter()
        .filter_map(|(site, t)| t.map(|t| (t, site)))
        .collect();
    times.sort_unstable();
    let mut out = std::io::BufWriter::new(fs::File::create(path("front.csv"))?);
    writeln!(out, "time,rightmost_activated,activated_count")?;
    let mut front = 0;
    for (k, (t, site)) in times.iter().enumerate() {
        front = front.max(*site);
        let last_at_time = times.get(k + 1).is_none_or(|(next, _)| next != t);
        if last_at_time {
            writeln!(out, "{t},{front},{}", k + 1)?;
        }
    }
    out.flush()?;

    let doubling = if args.doublings > 0 {
        horizon_doubling(&spec, &cfg, Proxy::LocalSurvival, args.doublings)?
    } else {
        Vec::new()
    };
    let report = json!({
        "format": REPORT_FORMAT,
        "model": spec.name(),
        "config": cfg,
        "local_survival_proxy": local,
        "infinite_activation_proxy": activation,
        "horizon_doubling": doubling,
        "site_frequencies": freqs,
    });
    write_json(&path("report.json"), &report)?;
    println!(
        "local survival proxy {:.4} ± {:.4}, activation proxy {:.4} ± {:.4} over {} trials",
        local.estimate,
        local.std_error,
        activation.estimate,
        activation.std_error,
        local.replications
    );
    Ok(())
}

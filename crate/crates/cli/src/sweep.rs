use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use frogwalk::criteria::{grid_values, phase_grid, power_law_spec, write_phase_csv, DriftSide};
use frogwalk::simulator::{estimate_local_survival_proxy, SimConfig};

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "left")]
    side: DriftSide,
    /// `start:end:step`, inclusive.
    #[arg(long, default_value = "0.25:3:0.25")]
    alpha: String,
    #[arg(long, default_value = "0.25:3:0.25")]
    beta: String,
    /// Add a `beta = inf` (immortal) column.
    #[arg(long)]
    immortal: bool,
    /// Grid CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simulator proxies on every k-th grid point, written here.
    #[arg(long)]
    overlay_out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    overlay_every: usize,
    #[arg(long, default_value_t = 200)]
    overlay_replications: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts[..] else {
        bail!("range {s:?} is not start:end:step");
    };
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number {x:?} in range {s:?}"))
    };
    let v = grid_values(num(a)?, num(b)?, num(c)?)?;
    if v[0] <= 0.0 {
        bail!("range {s:?} must be positive");
    }
    Ok(v)
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let alphas = range(&args.alpha)?;
    let mut betas = range(&args.beta)?;
    if args.immortal {
        betas.push(f64::INFINITY);
    }
    let rows = phase_grid(&alphas, &betas, args.side)?;
    match &args.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_phase_csv(&rows, std::io::BufWriter::new(file))?;
        }
        None => write_phase_csv(&rows, std::io::stdout().lock())?,
    }
    if let Some(path) = &args.overlay_out {
        let k = args.overlay_every.max(1);
        let mut out = std::io::BufWriter::new(fs::File::create(path)?);
        writeln!(out, "drift_side,alpha,beta,local,proxy_estimate,std_error")?;
        let cfg = SimConfig::new(100, 1_000, args.overlay_replications, args.seed);
        for (i, &alpha) in alphas.iter().enumerate().step_by(k) {
            for &beta in betas.iter().step_by(k) {
                let row = &rows
                    [i * betas.len() + betas.iter().position(|&b| b == beta).expect("from betas")];
                let spec = power_law_spec(row.point, 0.25)?;
                let est = estimate_local_survival_proxy(&spec, &cfg)?;
                writeln!(
                    out,
                    "{},{alpha},{beta},{:?},{:.4},{:.4}",
                    args.side, row.verdict.local, est.estimate, est.std_error
                )?;
            }
        }
        out.flush()?;
    }
    Ok(())
}

//! `frogwalk`: classify models, run simulations, sweep the power-law phase
//! map and run the oracle self-checks.
//!
//! Exit status: 0 for a decisive result, 2 when `classify` is inconclusive,
//! 1 on any error or failed check.

mod simulate;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use frogwalk::oracle::{run_oracle_checks, CheckOptions, Fault};
use frogwalk::simulator::{scenario, SCENARIOS};
use frogwalk::{classify, ModelSpec};

const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "frogwalk",
    version,
    about = "Frog models with drifts and geometric lifespans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify local survival, global survival and activation.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        /// Write the verdict as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the full JSON verdict after the summary line.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo runs; writes trials.csv, sites.csv, front.csv and report.json.
    Simulate(simulate::SimulateArgs),
    /// Power-law phase grid as CSV.
    SweepPhase(sweep::SweepArgs),
    /// Closed forms against brute force, enumeration and coupling checks.
    OracleCheck {
        /// Run no cases.
        #[arg(long)]
        empty: bool,
        /// Deliberately break the closed forms to see the suite fail.
        #[arg(long, hide = true, value_parser = ["wrong-sign-radicand"])]
        inject_fault: Option<String>,
        #[arg(long, default_value_t = 50)]
        coupling_trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    Scenarios,
}

#[derive(Args, Clone)]
pub(crate) struct ModelArgs {
    /// Model file (TOML).
    #[arg(required_unless_present = "scenario")]
    model: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long, conflicts_with = "model")]
    scenario: Option<String>,
}

impl ModelArgs {
    pub(crate) fn load(&self) -> Result<ModelSpec> {
        match (&self.model, &self.scenario) {
            (Some(path), _) => Ok(ModelSpec::load(path)?),
            (None, Some(name)) => scenario(name).with_context(|| {
                let names: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
                format!("unknown scenario {name:?}; known: {}", names.join(", "))
            }),
            (None, None) => bail!("no model given"),
        }
    }
}

pub(crate) fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify { model, out, json } => {
            let spec = model.load()?;
            let verdict = classify(&spec)?;
            let rules: Vec<&str> = verdict.citations.iter().map(|r| r.label()).collect();
            println!("{}, per {}", verdict.summary(), rules.join("/"));
            let value = verdict.to_json();
            if json {
                println!("{}", serde_json::to_string_pretty(&value)?);
            }
            if let Some(path) = out {
                write_json(&path, &value)?;
            }
            Ok(if verdict.is_decisive() {
                0
            } else {
                EXIT_INCONCLUSIVE
            })
        }
        Command::Simulate(args) => simulate::run(&args).map(|()| 0),
        Command::SweepPhase(args) => sweep::run(&args).map(|()| 0),
        Command::OracleCheck {
            empty,
            inject_fault,
            coupling_trials,
            out,
        } => {
            let opts = CheckOptions {
                empty,
                fault: inject_fault.map(|_| Fault::WrongSignRadicand),
                coupling_trials,
                ..CheckOptions::default()
            };
            let report = run_oracle_checks(&opts);
            for c in report.failures() {
                eprintln!("FAIL [{}] {}: {}", c.suite, c.name, c.detail);
            }
            let failed = report.failures().count();
            println!(
                "oracle-check: {} cases, {failed} failed",
                report.cases.len()
            );
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::Scenarios => {
            for (name, about) in SCENARIOS {
                println!("{name:20} {about}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as inconclusive
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

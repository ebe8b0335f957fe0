//! Batch front-end for macroqsim: reads a TOML experiment description,
//! validates it, runs it and writes CSV/JSON artifacts plus a manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use config::{effective_seeds, plan, Experiment, ExperimentConfig};
use error::CliError;
use output::Artifacts;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Manifest key excluded from reproducibility comparisons.
pub const TIMESTAMP_KEY: &str = "generated_at";

pub struct Invocation {
    pub experiment: Experiment,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seeds: Vec<u64>,
    pub reference: bool,
}

fn load(path: Option<&Path>, experiment: Experiment, reference: bool) -> Result<ExperimentConfig, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            ExperimentConfig::parse(&text)
        }
        // Both run entirely on built-in defaults.
        None if experiment == Experiment::Identities || (experiment == Experiment::LgChsh && reference) => Ok(ExperimentConfig::default()),
        None => Err(CliError::Config(format!("experiment {} needs --config", experiment.name()))),
    }
}

/// Validate, run and write everything; returns the output directory.
pub fn execute(inv: &Invocation) -> Result<PathBuf, CliError> {
    let cfg = load(inv.config.as_deref(), inv.experiment, inv.reference)?;
    let seeds = effective_seeds(&inv.seeds, &cfg, &(0..16).collect::<Vec<_>>());
    let plan = plan(&cfg, inv.experiment, &seeds, inv.reference)?;
    let dir = inv
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().and_then(|o| o.dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut artifacts = Artifacts::new(&dir)?;
    run::run(&plan, &mut artifacts)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "tool": "macroqsim",
        "library_version": macroqsim::VERSION,
        "experiment": inv.experiment,
        "reference": inv.reference,
        "seeds": seeds,
        "config": cfg,
        "files": artifacts.files,
        TIMESTAMP_KEY: stamp,
    });
    artifacts.write_json("manifest.json", "this manifest", &manifest)?;
    Ok(dir)
}

//! Experiment harness: configuration, figure-style sweeps and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

mod config;
pub mod experiments;

pub use config::Config;
pub use experiments::Experiment;

/// Environment variable overriding the number of worker threads.
pub const WORKERS_ENV: &str = "NEARFIELD_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    /// Bad flags, config values or grids; maps to exit status 2.
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] nearfield_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Record of one run: enough to regenerate every output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// Every resolved parameter, defaults included.
    pub config: BTreeMap<String, String>,
    /// CSV files written, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn read(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn experiment(&self) -> Result<Experiment, ExperimentError> {
        parse_experiment(&self.command)
    }

    pub fn resolved_config(&self) -> Config {
        Config::from_pairs(self.config.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }
}

pub fn parse_experiment(name: &str) -> Result<Experiment, ExperimentError> {
    [Experiment::Resolution, Experiment::OutageLine, Experiment::OutageCluster]
        .into_iter()
        .find(|e| e.name() == name)
        .ok_or_else(|| ExperimentError::Usage(format!("unknown experiment `{name}`")))
}

/// Defaults, then the config file, then explicit overrides.
pub fn resolve_config(experiment: Experiment, file: Option<&Config>, overrides: &Config) -> Config {
    let mut cfg = experiment.defaults();
    if let Some(f) = file {
        cfg = cfg.overlay(f);
    }
    cfg.overlay(overrides)
}

/// Runs the sweep on `workers` threads (`None`: rayon's default) and returns
/// the CSV text.
pub fn run_csv(experiment: Experiment, cfg: &Config, workers: Option<usize>) -> Result<String, ExperimentError> {
    match workers {
        Some(0) => Err(ExperimentError::Usage("worker count must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| experiment.run(cfg))
        }
        None => experiment.run(cfg),
    }
}

/// Runs the sweep and writes `<command>.csv`, `resolved.conf` and
/// `manifest.json` into `out_dir`.
pub fn run_to_dir(
    experiment: Experiment,
    cfg: &Config,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<RunManifest, ExperimentError> {
    let start = Instant::now();
    let seed: u64 = cfg.value("seed")?;
    let csv = run_csv(experiment, cfg, workers)?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let csv_name = format!("{}.csv", experiment.name());
    let csv_path = out_dir.join(&csv_name);
    fs::write(&csv_path, csv).map_err(io_err(&csv_path))?;
    let conf_path = out_dir.join("resolved.conf");
    fs::write(&conf_path, cfg.to_text()).map_err(io_err(&conf_path))?;
    let manifest = RunManifest {
        command: experiment.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        config: cfg.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        outputs: vec![csv_name],
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out_dir.join(RunManifest::FILE_NAME);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(manifest)
}

/// Re-runs a manifest into `out_dir`.
pub fn replay(manifest_path: &Path, out_dir: &Path, workers: Option<usize>) -> Result<RunManifest, ExperimentError> {
    let m = RunManifest::read(manifest_path)?;
    run_to_dir(m.experiment()?, &m.resolved_config(), out_dir, workers)
}

/// Worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>, ExperimentError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| ExperimentError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

//! Command-line surface.

use std::path::PathBuf;

use clap::Parser;

use netmimo::config::{load_config, SystemConfig};

use crate::error::Result;
use crate::experiments::{EmptyPolicy, ExperimentName, Method, RunRequest};
use crate::output::read_manifest;

#[derive(Debug, Clone, Parser)]
#[command(name = "netmimo", version, about = "Rate analysis and simulation of clustered network MIMO downlinks")]
pub struct Cli {
    /// Experiment to run.
    #[arg(long, value_enum, required_unless_present = "from_manifest")]
    pub experiment: Option<ExperimentName>,

    /// Flat `key = value` configuration file; missing keys take the reference defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,

    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,

    /// Simulated topologies per point.
    #[arg(long, default_value_t = 200)]
    pub topologies: usize,

    /// Fading slots per topology.
    #[arg(long, default_value_t = 20)]
    pub fading: usize,

    /// Relative tolerance of each analytic rate.
    #[arg(long, default_value_t = 1e-4)]
    pub quad_tol: f64,

    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,

    /// Comma-separated loading factors replacing the experiment's default axis.
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,

    /// Comma-separated average cluster sizes replacing the experiment's default axis.
    #[arg(long, value_delimiter = ',')]
    pub cluster_sizes: Option<Vec<f64>>,

    /// Simulated topologies whose measured cluster has no BS.
    #[arg(long, value_enum, default_value_t = EmptyPolicy::Redraw)]
    pub empty_center: EmptyPolicy,

    /// Repeat the run recorded in a manifest; only `--out-dir` and `--workers` apply.
    #[arg(long, conflicts_with_all = ["experiment", "config"])]
    pub from_manifest: Option<PathBuf>,
}

impl Cli {
    /// The fully resolved request, from a manifest or from the flags.
    pub fn request(&self) -> Result<RunRequest> {
        if let Some(path) = &self.from_manifest {
            return Ok(read_manifest(path)?.request);
        }
        let config = match &self.config {
            Some(path) => load_config(path)?,
            None => SystemConfig::default(),
        };
        Ok(RunRequest {
            experiment: self.experiment.expect("clap enforces --experiment"),
            method: self.method,
            seed: self.seed,
            topologies: self.topologies,
            fading: self.fading,
            quad_tol: self.quad_tol,
            empty_center: self.empty_center,
            eta: self.eta.clone(),
            cluster_sizes: self.cluster_sizes.clone(),
            config,
        })
    }
}

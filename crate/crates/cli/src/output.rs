//! CSV and JSON manifest emission.
//!
//! Every curve is written to `<out>/<curve>.csv` with the columns
//! `axis,value,ci,method,seed,config_digest,status`; `manifest.json`
//! records the full request (configuration included) so the run can be
//! repeated from it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::experiments::{Curve, ExperimentOutput, ExperimentSpec, RunRequest};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Serialize)]
struct Row<'a> {
    axis: f64,
    value: f64,
    ci: f64,
    method: &'a str,
    seed: u64,
    config_digest: &'a str,
    status: &'a str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub name: String,
    pub file: String,
    pub axis: String,
    pub points: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub request: RunRequest,
    pub spec: ExperimentSpec,
    pub config_digest: String,
    /// The resolved configuration in config-file syntax.
    pub config_text: String,
    pub curves: Vec<CurveEntry>,
    pub summary: BTreeMap<String, f64>,
    pub passed: Option<bool>,
}

fn write_curve(path: &Path, curve: &Curve, seed: u64, digest: &str) -> Result<()> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for p in &curve.points {
        w.serialize(Row {
            axis: p.axis,
            value: p.value,
            ci: p.ci,
            method: &p.method,
            seed,
            config_digest: digest,
            status: &p.status,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write all curves and the manifest into `dir` (created if missing).
pub fn write_outputs(out: &ExperimentOutput, req: &RunRequest, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let digest = req.config.digest();
    let mut curves = Vec::with_capacity(out.curves.len());
    for curve in &out.curves {
        let file = format!("{}.csv", curve.name);
        write_curve(&dir.join(&file), curve, req.seed, &digest)?;
        curves.push(CurveEntry {
            name: curve.name.clone(),
            file,
            axis: curve.axis.to_string(),
            points: curve.points.len(),
            errors: curve.points.iter().filter(|p| p.is_error()).count(),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        request: req.clone(),
        spec: out.spec.clone(),
        config_digest: digest,
        config_text: req.config.to_text(),
        curves,
        summary: out.summary.clone(),
        passed: out.passed,
    };
    let path: PathBuf = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|source| CliError::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, json + "\n").map_err(|source| CliError::Io { path, source })?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

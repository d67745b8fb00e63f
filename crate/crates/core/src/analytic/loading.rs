//! Search over the loading factor η = K/(BM).

use super::{per_bs_ergodic_sum_rate, AnalyticParams, QuadratureSpec, RateResult};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

const MAX_STEP: f64 = 0.05;

/// Rate curve over a loading grid and its maximizer.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LoadingCurve {
    pub best_eta: f64,
    pub best_rate: f64,
    pub points: Vec<(f64, RateResult)>,
}

/// Inclusive grid `lo, lo+step, …, hi`, rounded to 12 decimals so repeated
/// addition does not drift.
pub fn eta_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi <= 1.0 && lo <= hi && step > 0.0) {
        return Err(Error::param("eta_grid", format!("need 0 < {lo} ≤ {hi} ≤ 1, step {step} > 0")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

/// Argmax of the per-BS rate over `grid` with `ρ` recomputed for each η.
/// Ties go to the smaller η.
pub fn optimal_loading_factor(
    config: &SystemConfig,
    avg_cluster_size: f64,
    grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<LoadingCurve> {
    if grid.is_empty() {
        return Err(Error::param("eta_grid", "empty grid"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    if sorted.windows(2).any(|w| w[1] - w[0] > MAX_STEP + 1e-12) {
        return Err(Error::param("eta_grid", format!("grid step must not exceed {MAX_STEP}")));
    }
    let mut points = Vec::with_capacity(sorted.len());
    let (mut best_eta, mut best_rate) = (f64::NAN, f64::NEG_INFINITY);
    for &eta in &sorted {
        let p = AnalyticParams::from_config(config, eta, avg_cluster_size)?;
        let r = per_bs_ergodic_sum_rate(&p, spec)?;
        if r.value > best_rate {
            best_rate = r.value;
            best_eta = eta;
        }
        points.push((eta, r));
    }
    Ok(LoadingCurve {
        best_eta,
        best_rate,
        points,
    })
}

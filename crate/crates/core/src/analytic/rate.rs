//! The z- and d-integrals that turn the kernels into ergodic rates.

use std::cell::Cell;
use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use super::kernels::{AngularGrid, KernelPath};
use super::{AnalyticParams, QuadratureSpec, RateMethod, RateResult};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod, GaussLegendre};

/// `e^{-zΓ}` falls below this fraction of its peak at the upper z cut-off.
const Z_TAIL: f64 = 1e-12;

/// `∫₀^∞ e^{-zΓ}/z · h(z) dz` in nats, for `0 ≤ h(z) ≤ slope·z`.
///
/// Integrated over `s = ln z`, which turns the `1/z` weight into `ds` and
/// spreads the transition regions evenly. Below `z_lo` the integral is at
/// most `slope·z_lo`, so the lower cut-off is placed where that is 1e-12,
/// or smaller when the requested tolerance is tighter than 1e-8.
pub(crate) fn log_z_integral<H>(mut h: H, gap: f64, slope: f64, spec: &QuadratureSpec) -> Result<f64>
where
    H: FnMut(f64) -> Result<f64>,
{
    if slope <= 0.0 {
        return Ok(0.0);
    }
    let s_hi = ((1.0 / Z_TAIL).ln() / gap).ln();
    let s_lo = (Z_TAIL.min(spec.rate_rel_tol * 1e-4) / slope).ln().min(s_hi - 1.0);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let f = |s: f64| {
        let z = s.exp();
        match h(z) {
            Ok(v) => (-z * gap).exp() * v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let res = gauss_kronrod(f, s_lo, s_hi, spec.rate_rel_tol, 1e-14, spec.z_nodes);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    res.map(|r| r.value)
}

/// `ln(1 + x)` through `∫₀^∞ (e^{-t}/t)(1 − e^{-xt}) dt`, the transform
/// that underlies the rate expression.
pub fn log1p_via_laplace(x: f64, spec: &QuadratureSpec) -> Result<f64> {
    log_z_integral(|t| Ok(-(-x * t).exp_m1()), 1.0, x, spec)
}

fn signal_slope(p: &AnalyticParams) -> f64 {
    // E_S(z) ≤ zρϖ · λ ∫_{ℝ²} β(r) dr
    p.rho * p.varpi * p.lambda * 2.0 * PI * p.d_o * p.d_o / ((p.alpha - 1.0) * (p.alpha - 2.0))
}

fn check_distance(d: f64, p: &AnalyticParams) -> Result<()> {
    if d >= 0.0 && d <= p.cluster_radius {
        Ok(())
    } else {
        Err(Error::param(
            "d",
            format!("user distance {d} must lie in [0, {}]", p.cluster_radius),
        ))
    }
}

fn rate_nats(d: f64, p: &AnalyticParams, spec: &QuadratureSpec, path: KernelPath) -> Result<f64> {
    let grid = AngularGrid::new(d, p, spec.theta_nodes);
    let h = |z: f64| {
        let es = grid.signal_exponent(z, p, spec, path)?;
        let ei = if p.interference {
            grid.interference_exponent(z, p, spec, path)?
        } else {
            0.0
        };
        Ok((-ei).exp() * -(-es).exp_m1())
    };
    log_z_integral(h, p.gap, signal_slope(p), spec).map_err(|e| {
        Error::Quadrature(format!(
            "rate at d={d:.3} m (eta={}, B={}): {e}",
            p.eta, p.avg_cluster_size
        ))
    })
}

/// Ergodic rate in bits/s/Hz of a user at distance `d` from the cluster center.
pub fn ergodic_rate_at_distance(d: f64, p: &AnalyticParams, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    check_distance(d, p)?;
    Ok(rate_nats(d, p, spec, KernelPath::Hypergeometric)? / LN_2)
}

/// `ηM ∫₀^{R_c} f(d) · per-user(d) dd` with `f(d) = 2d/R_c²`, evaluated by
/// Gauss–Legendre in d. Nodes run in parallel and are summed in node order.
fn disk_average<F>(p: &AnalyticParams, spec: &QuadratureSpec, per_user_nats: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let rc = p.cluster_radius;
    let nodes: Vec<(f64, f64)> = GaussLegendre::new(spec.d_nodes).on_interval(0.0, rc).collect();
    let terms: Vec<Result<f64>> = nodes
        .par_iter()
        .map(|&(d, w)| per_user_nats(d).map(|r| w * 2.0 * d / (rc * rc) * r))
        .collect();
    let mut sum = 0.0;
    for t in terms {
        sum += t?;
    }
    Ok(p.beams_per_bs() * sum / LN_2)
}

/// Per-BS ergodic sum rate through the closed-form kernels.
pub fn per_bs_ergodic_sum_rate(p: &AnalyticParams, spec: &QuadratureSpec) -> Result<RateResult> {
    per_bs_ergodic_sum_rate_with(p, spec, KernelPath::Hypergeometric)
}

pub fn per_bs_ergodic_sum_rate_with(
    p: &AnalyticParams,
    spec: &QuadratureSpec,
    path: KernelPath,
) -> Result<RateResult> {
    spec.validate()?;
    let value = disk_average(p, spec, |d| rate_nats(d, p, spec, path))?;
    Ok(RateResult {
        value: value.max(0.0),
        method: match path {
            KernelPath::Hypergeometric => RateMethod::AnalyticHypergeometric,
            KernelPath::RadialQuadrature => RateMethod::AnalyticQuadrature,
        },
        ci_halfwidth: 0.0,
        params_digest: p.digest(),
    })
}

fn isolated_cell_nats(d: f64, p: &AnalyticParams, spec: &QuadratureSpec) -> Result<f64> {
    let shape = p.antennas as f64 * (1.0 - p.eta) + 1.0;
    let snr = p.rho * (1.0 + d / p.d_o).powf(-p.alpha);
    log_z_integral(|z| Ok(-(-shape * (z * snr).ln_1p()).exp_m1()), p.gap, shape * snr, spec)
}

/// Rate of a user at distance `d` from a lone BS serving `ηM` users with ZF:
/// `E log₂(1 + ρβ(d)X/Γ)`, `X ~ Gamma(M − ηM + 1, 1)`.
pub fn isolated_cell_user_rate(d: f64, p: &AnalyticParams, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    check_distance(d, p)?;
    Ok(isolated_cell_nats(d, p, spec)? / LN_2)
}

/// Sum rate of a lone BS with users uniform in the disk of radius
/// `p.cluster_radius` and no interference.
pub fn isolated_cell_rate(p: &AnalyticParams, spec: &QuadratureSpec) -> Result<RateResult> {
    spec.validate()?;
    let value = disk_average(p, spec, |d| isolated_cell_nats(d, p, spec))?;
    Ok(RateResult {
        value,
        method: RateMethod::AnalyticQuadrature,
        ci_halfwidth: 0.0,
        params_digest: p.digest(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;
    use approx::assert_relative_eq;

    fn params(eta: f64, b: f64) -> AnalyticParams {
        AnalyticParams::from_config(&SystemConfig::default(), eta, b).unwrap()
    }

    #[test]
    fn laplace_log_identity() {
        let spec = QuadratureSpec {
            rate_rel_tol: 1e-10,
            ..QuadratureSpec::default()
        };
        for x in [0.1, 1.0, 10.0] {
            assert_relative_eq!(log1p_via_laplace(x, &spec).unwrap(), x.ln_1p(), max_relative = 1e-8);
        }
    }

    #[test]
    fn cluster_edge_penalty() {
        let p = params(0.6, 4.0);
        let q = QuadratureSpec::default();
        let center = ergodic_rate_at_distance(0.0, &p, &q).unwrap();
        let half = ergodic_rate_at_distance(0.5 * p.cluster_radius, &p, &q).unwrap();
        let edge = ergodic_rate_at_distance(p.cluster_radius, &p, &q).unwrap();
        assert!(center > half && half > edge, "{center} {half} {edge}");
        assert!(ergodic_rate_at_distance(1.01 * p.cluster_radius, &p, &q).is_err());
    }

    #[test]
    fn vanishing_snr_gives_vanishing_rate() {
        let mut p = params(0.6, 4.0);
        p.rho = 1e-12;
        let r = ergodic_rate_at_distance(10.0, &p, &QuadratureSpec::default()).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn isolated_cell_matches_gamma_expectation() {
        // E ln(1 + cX) for X ~ Gamma(k, 1) by direct quadrature of the density.
        let p = params(0.6, 1.0);
        let q = QuadratureSpec {
            rate_rel_tol: 1e-10,
            ..QuadratureSpec::default()
        };
        let d = 200.0;
        let c = p.rho * (1.0 + d / p.d_o).powf(-p.alpha) / p.gap;
        let density = |x: f64| x * x * (-x).exp() / 2.0;
        let direct = gauss_kronrod(|x| (c * x).ln_1p() * density(x), 0.0, 80.0, 1e-13, 0.0, 200)
            .unwrap()
            .value
            / LN_2;
        assert_relative_eq!(isolated_cell_user_rate(d, &p, &q).unwrap(), direct, max_relative = 1e-8);
    }
}

//! Empirical signal and interference power distributions, and center-user
//! channel statistics used to check the analytic bounds.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::layout::deploy;
use super::streams::{substream, TAG_PROBE};
use super::{with_workers, SimPlan};
use crate::beamforming::zf_beams;
use crate::channel::{channel_from_pathloss, composite_channel, sample_fading};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::gamma_matching::{
    interference_beam_power_params, interference_channel_params, intended_channel_params, signal_power_params,
    GammaParams,
};
use crate::geometry::{scheduled_users, Point2D};
use crate::stats::{ks_test, mean_ci, MeanCi};

/// Deterministic BS layout seen by one tagged user: path losses to the BSs
/// of its serving cluster and to the BSs of one interfering cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLayout {
    pub serving_pathloss: Vec<f64>,
    pub interferer_pathloss: Vec<f64>,
    pub antennas: usize,
    pub eta: f64,
}

/// Fading-only samples of the ZF signal power `|gᴴw|²` and of the power
/// `|fᴴw|²` leaked through one interfering beam, with their matched Gamma
/// laws and KS statistics `(D, p)` against them.
#[derive(Debug, Clone)]
pub struct PowerSamples {
    pub signal: Vec<f64>,
    pub signal_fit: GammaParams,
    pub signal_ks: (f64, f64),
    pub interference: Vec<f64>,
    pub interference_fit: GammaParams,
    pub interference_ks: (f64, f64),
}

/// The co-scheduled users of both clusters have isotropic unit channels;
/// only the tagged user's channel carries the layout's path losses.
pub fn collect_power_samples(layout: &PowerLayout, n: usize, seed: u64) -> Result<PowerSamples> {
    let m = layout.antennas;
    let b = layout.serving_pathloss.len();
    let bi = layout.interferer_pathloss.len();
    if b == 0 || bi == 0 || n == 0 {
        return Err(Error::param("layout", "need serving and interfering BSs and n ≥ 1"));
    }
    let k = scheduled_users(layout.eta, m, b, true);
    let ki = scheduled_users(layout.eta, m, bi, true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signal = Vec::with_capacity(n);
    let mut interference = Vec::with_capacity(n);
    for _ in 0..n {
        let g = channel_from_pathloss(&layout.serving_pathloss, m, &mut rng).coeffs;
        let mut chans: Vec<DVector<Complex64>> = vec![g.clone()];
        chans.extend((1..k).map(|_| sample_fading(m * b, &mut rng)));
        let w = zf_beams(&chans, 1.0)?.beam(0);
        signal.push(g.dotc(&w).norm_sqr());

        let others: Vec<DVector<Complex64>> = (0..ki).map(|_| sample_fading(m * bi, &mut rng)).collect();
        let v = zf_beams(&others, 1.0)?.beam(0);
        let f = channel_from_pathloss(&layout.interferer_pathloss, m, &mut rng).coeffs;
        interference.push(f.dotc(&v).norm_sqr());
    }
    let intended = intended_channel_params(&layout.serving_pathloss, m)?;
    let signal_fit = signal_power_params(&intended, m, b, layout.eta)?;
    let interf = interference_channel_params(&layout.interferer_pathloss, m)?;
    let interference_fit = interference_beam_power_params(&interf, m, bi)?;
    let signal_ks = ks_test(&signal, |x| signal_fit.cdf(x));
    let interference_ks = ks_test(&interference, |x| interference_fit.cdf(x));
    Ok(PowerSamples {
        signal,
        signal_fit,
        signal_ks,
        interference,
        interference_fit,
        interference_ks,
    })
}

/// Per-topology means of `probe(user channel, cluster BSs, rng)` for a user
/// at the center of the measured cluster. Empty clusters contribute zero.
fn center_statistic<F>(plan: &SimPlan, config: &SystemConfig, probe: F) -> Result<MeanCi>
where
    F: Fn(&[Point2D], &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    plan.validate()?;
    config.validate()?;
    let means: Vec<Result<f64>> = with_workers(plan.workers, || {
        (0..plan.n_topologies as u64)
            .into_par_iter()
            .map(|t| {
                let topo = deploy(plan, config, t, 0)?;
                let bs: Vec<Point2D> = topo
                    .bs_points
                    .iter()
                    .zip(&topo.cluster_of_bs)
                    .filter(|(_, &c)| c == 0)
                    .map(|(p, _)| *p)
                    .collect();
                if bs.is_empty() {
                    return Ok(0.0);
                }
                let mut sum = 0.0;
                for s in 0..plan.n_fading as u64 {
                    let mut rng = substream(plan.seed, TAG_PROBE, t, s, 0);
                    sum += probe(&bs, &mut rng)?;
                }
                Ok(sum / plan.n_fading as f64)
            })
            .collect()
    })?;
    let means: Vec<f64> = means.into_iter().collect::<Result<_>>()?;
    Ok(mean_ci(&means))
}

/// `E‖g‖²` of the stacked channel from the measured cluster to a user at its center.
pub fn center_channel_strength(plan: &SimPlan, config: &SystemConfig) -> Result<MeanCi> {
    let pl = config.pathloss();
    let origin = Point2D::new(0.0, 0.0);
    center_statistic(plan, config, |bs, rng| {
        Ok(composite_channel(origin, bs, config.antennas, &pl, rng)?.strength())
    })
}

/// `E|gᴴw|²` of a ZF user at the center of the measured cluster, co-scheduled
/// with uniformly placed users up to `round(ηMB)` in total.
pub fn center_signal_power(plan: &SimPlan, config: &SystemConfig) -> Result<MeanCi> {
    let pl = config.pathloss();
    let m = config.antennas;
    let lattice = super::layout::lattice_for(plan, config)?;
    center_statistic(plan, config, |bs, rng| {
        let k = scheduled_users(plan.eta, m, bs.len(), true);
        let mut users = vec![Point2D::new(0.0, 0.0)];
        users.extend((1..k).map(|_| lattice.sample_in(0, rng)));
        let chans: Vec<DVector<Complex64>> = users
            .iter()
            .map(|u| composite_channel(*u, bs, m, &pl, rng).map(|c| c.coeffs))
            .collect::<Result<_>>()?;
        let w = zf_beams(&chans, 1.0)?.beam(0);
        Ok(chans[0].dotc(&w).norm_sqr())
    })
}

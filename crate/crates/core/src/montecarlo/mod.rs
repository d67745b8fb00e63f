//! First-principles simulation of the clustered downlink.
//!
//! Each topology draws a PPP of BSs over a hexagonal tessellation (19
//! clusters by default) and measures the center cluster. Each fading slot
//! schedules users, builds ZF (or RZF) beams in every cluster from actual
//! Rayleigh channels, and evaluates the SINR of the measured users against
//! the beams of all other clusters.

mod layout;
mod power;
mod streams;

pub use layout::associate_users;
pub use power::{center_channel_strength, center_signal_power, collect_power_samples, PowerLayout, PowerSamples};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beamforming::{rzf_beams, sinr, zf_beams, BeamSet};
use crate::channel::composite_channel;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::{scheduled_users, Point2D};
use crate::stats::{empirical_cdf, mean_ci};
use layout::{build_layout, fresh_user, Layout};
use streams::{substream, TAG_SLOT};

/// Redraw budget for a topology whose measured set has no BS.
const MAX_ATTEMPTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Association {
    #[default]
    LocationBased,
    ChannelBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BsCountModel {
    #[default]
    Poisson,
    /// `round(B̄)` BSs uniformly placed in every hexagon.
    FixedPerCluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Beamformer {
    #[default]
    Zf,
    /// Regularized ZF with regularizer `1/ρ`.
    Rzf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    #[default]
    FullNetwork,
    /// The center cluster alone, without inter-cluster interference.
    IsolatedCluster,
    /// One BS at the center of a hexagon of area `1/λ`, no interference.
    IsolatedCell,
    /// Every BS is its own cluster serving the users nearest to it.
    SingleCellProcessing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    /// Uniformly random users each slot.
    #[default]
    Random,
    /// Cycle through each cluster's associated users.
    RoundRobin,
}

/// What to do with a topology whose measured set has no BS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyCenter {
    /// Draw a new topology (estimates the rate conditioned on a non-empty cluster).
    #[default]
    Redraw,
    /// Keep it with zero rate (the unconditional average the analytic model computes).
    CountZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPlan {
    pub n_topologies: usize,
    pub n_fading: usize,
    pub seed: u64,
    pub eta: f64,
    pub avg_cluster_size: f64,
    pub association: Association,
    pub bs_count_model: BsCountModel,
    pub beamformer: Beamformer,
    pub scenario: Scenario,
    pub scheduler: Scheduler,
    pub empty_center: EmptyCenter,
    /// Rings of interfering clusters around the measured one.
    pub layers: usize,
    /// Place the measured users at this distance from their cluster center.
    pub user_distance: Option<f64>,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl SimPlan {
    /// 200 topologies × 20 fading slots over 19 clusters, location-based
    /// association, Poisson BS counts, ZF.
    pub fn new(eta: f64, avg_cluster_size: f64) -> Self {
        Self {
            n_topologies: 200,
            n_fading: 20,
            seed: 1,
            eta,
            avg_cluster_size,
            association: Association::default(),
            bs_count_model: BsCountModel::default(),
            beamformer: Beamformer::default(),
            scenario: Scenario::default(),
            scheduler: Scheduler::default(),
            empty_center: EmptyCenter::default(),
            layers: 2,
            user_distance: None,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_topologies == 0 || self.n_fading == 0 {
            return Err(Error::param("plan", "topology and fading counts must be at least 1"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::param("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.avg_cluster_size >= 1.0 && self.avg_cluster_size.is_finite()) {
            return Err(Error::param(
                "avg_cluster_size",
                format!("must be at least 1, got {}", self.avg_cluster_size),
            ));
        }
        if self.scenario == Scenario::IsolatedCell && self.avg_cluster_size != 1.0 {
            return Err(Error::param("avg_cluster_size", "an isolated cell has exactly one BS"));
        }
        if let Some(d) = self.user_distance {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::param("user_distance", format!("must be non-negative, got {d}")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", "need at least one worker"));
        }
        Ok(())
    }

    fn pooled(&self) -> bool {
        self.scheduler == Scheduler::RoundRobin
            || self.association == Association::ChannelBased
            || self.scenario == Scenario::SingleCellProcessing
    }

    fn has_interference(&self) -> bool {
        matches!(self.scenario, Scenario::FullNetwork | Scenario::SingleCellProcessing)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    /// Mean over topologies of the measured per-BS sum rate (bits/s/Hz).
    pub per_bs_rate: f64,
    pub ci95: f64,
    /// Mean rate of a scheduled measured user.
    pub per_user_rate: f64,
    pub topology_means: Vec<f64>,
    /// Draws whose measured set had no BS (redrawn or counted as zero).
    pub empty_draws: usize,
    /// Long-run rates of every associated measured user (pool modes only).
    pub user_rate_samples: Vec<f64>,
    pub n_topologies: usize,
    pub n_fading: usize,
}

struct TopologyOutcome {
    per_bs: f64,
    user_rate_sum: f64,
    user_count: usize,
    empty_draws: usize,
    long_run: Vec<f64>,
}

struct ClusterSlot {
    users: Vec<(Point2D, Option<usize>)>,
    channels: Vec<DVector<Complex64>>,
    beams: Option<BeamSet>,
    rng: rand_chacha::ChaCha8Rng,
}

fn pick_from_pool(
    pool_len: usize,
    k: usize,
    slot: usize,
    scheduler: Scheduler,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<usize> {
    let k = k.min(pool_len);
    match scheduler {
        Scheduler::Random => index::sample(rng, pool_len, k).into_vec(),
        Scheduler::RoundRobin => (0..k).map(|i| (slot * k + i) % pool_len).collect(),
    }
}

/// Per-slot totals over the measured clusters.
struct SlotTotals {
    sum_rate: f64,
    scheduled: usize,
}

fn run_slot(
    layout: &Layout,
    plan: &SimPlan,
    config: &SystemConfig,
    t: u64,
    slot: usize,
    long_run: &mut [Vec<f64>],
) -> Result<SlotTotals> {
    let pl = config.pathloss();
    let m = config.antennas;
    let snr_per_bs = config.tx_power_w() / config.noise_w();
    let reg = 1.0 / config.rho(plan.eta);
    let gap = config.gap_linear();
    let interference = plan.has_interference();

    let mut state: Vec<ClusterSlot> = Vec::with_capacity(layout.clusters.len());
    for (c, cluster) in layout.clusters.iter().enumerate() {
        let mut rng = substream(plan.seed, TAG_SLOT, t, slot as u64, c as u64);
        let b = cluster.bs.len();
        let active = b > 0 && (cluster.measured || interference);
        let users: Vec<(Point2D, Option<usize>)> = if !active {
            Vec::new()
        } else if layout.pooled {
            let k = scheduled_users(plan.eta, m, b, cluster.measured);
            pick_from_pool(cluster.pool.len(), k, slot, plan.scheduler, &mut rng)
                .into_iter()
                .map(|i| (cluster.pool[i], Some(i)))
                .collect()
        } else {
            let k = scheduled_users(plan.eta, m, b, cluster.measured);
            let dist = if cluster.measured { plan.user_distance } else { None };
            (0..k)
                .map(|_| (fresh_user(&layout.lattice, cluster.region, cluster.center, dist, &mut rng), None))
                .collect()
        };
        let channels: Vec<DVector<Complex64>> = users
            .iter()
            .map(|(u, _)| composite_channel(*u, &cluster.bs, m, &pl, &mut rng).map(|c| c.coeffs))
            .collect::<Result<_>>()?;
        let beams = if channels.is_empty() {
            None
        } else {
            let total = b as f64 * snr_per_bs;
            Some(match plan.beamformer {
                Beamformer::Zf => zf_beams(&channels, total)?,
                Beamformer::Rzf => rzf_beams(&channels, reg, total)?,
            })
        };
        state.push(ClusterSlot {
            users,
            channels,
            beams,
            rng,
        });
    }

    let mut totals = SlotTotals {
        sum_rate: 0.0,
        scheduled: 0,
    };
    for c in 0..state.len() {
        if !layout.clusters[c].measured {
            continue;
        }
        let Some(own) = state[c].beams.clone() else {
            continue;
        };
        for u in 0..state[c].users.len() {
            let (pos, pool_idx) = state[c].users[u];
            let mut leak: Vec<(DVector<Complex64>, usize)> = Vec::new();
            if interference {
                for j in 0..state.len() {
                    if j == c || state[j].beams.is_none() {
                        continue;
                    }
                    let f = composite_channel(pos, &layout.clusters[j].bs, m, &pl, &mut state[j].rng)?.coeffs;
                    leak.push((f, j));
                }
            }
            let interferers: Vec<(&DVector<Complex64>, &BeamSet)> = leak
                .iter()
                .map(|(f, j)| (f, state[*j].beams.as_ref().expect("active cluster")))
                .collect();
            let s = sinr(&state[c].channels[u], &own.beam(u), own.per_beam_power, &interferers, 1.0, gap);
            totals.sum_rate += s.rate;
            totals.scheduled += 1;
            if let Some(i) = pool_idx {
                long_run[c][i] += s.rate;
            }
        }
    }
    Ok(totals)
}

fn run_topology(plan: &SimPlan, config: &SystemConfig, t: u64) -> Result<TopologyOutcome> {
    let mut empty_draws = 0;
    let layout = loop {
        if empty_draws as u64 >= MAX_ATTEMPTS {
            return Err(Error::param(
                "avg_cluster_size",
                format!("measured cluster empty in {MAX_ATTEMPTS} consecutive draws"),
            ));
        }
        match build_layout(plan, config, t, empty_draws as u64)? {
            Some(l) => break l,
            None if plan.empty_center == EmptyCenter::CountZero => {
                return Ok(TopologyOutcome {
                    per_bs: 0.0,
                    user_rate_sum: 0.0,
                    user_count: 0,
                    empty_draws: 1,
                    long_run: Vec::new(),
                })
            }
            None => empty_draws += 1,
        }
    };
    let bs = layout.measured_bs() as f64;
    let mut long_run: Vec<Vec<f64>> = layout.clusters.iter().map(|c| vec![0.0; c.pool.len()]).collect();
    let (mut per_bs, mut user_rate_sum, mut user_count) = (0.0, 0.0, 0);
    for slot in 0..plan.n_fading {
        let totals = run_slot(&layout, plan, config, t, slot, &mut long_run)?;
        per_bs += totals.sum_rate / bs;
        user_rate_sum += totals.sum_rate;
        user_count += totals.scheduled;
    }
    let n = plan.n_fading as f64;
    let long_run = layout
        .clusters
        .iter()
        .zip(long_run)
        .filter(|(c, _)| c.measured)
        .flat_map(|(_, rates)| rates.into_iter().map(move |r| r / n))
        .collect();
    Ok(TopologyOutcome {
        per_bs: per_bs / n,
        user_rate_sum,
        user_count,
        empty_draws,
        long_run,
    })
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::param("workers", e.to_string())),
    }
}

/// Simulate `plan` and report the measured per-BS ergodic sum rate.
///
/// Topologies run in parallel, each on its own substreams; the reduction
/// is in topology order, so the result is bitwise independent of the
/// worker count.
pub fn run(plan: &SimPlan, config: &SystemConfig) -> Result<SimResult> {
    plan.validate()?;
    config.validate()?;
    let outcomes: Vec<Result<TopologyOutcome>> = with_workers(plan.workers, || {
        (0..plan.n_topologies as u64)
            .into_par_iter()
            .map(|t| run_topology(plan, config, t))
            .collect()
    })?;
    let mut means = Vec::with_capacity(plan.n_topologies);
    let (mut rate_sum, mut count, mut empty_draws) = (0.0, 0usize, 0usize);
    let mut samples = Vec::new();
    for o in outcomes {
        let o = o?;
        means.push(o.per_bs);
        rate_sum += o.user_rate_sum;
        count += o.user_count;
        empty_draws += o.empty_draws;
        samples.extend(o.long_run);
    }
    let summary = mean_ci(&means);
    Ok(SimResult {
        per_bs_rate: summary.mean,
        ci95: summary.ci95,
        per_user_rate: if count > 0 { rate_sum / count as f64 } else { 0.0 },
        topology_means: means,
        empty_draws,
        user_rate_samples: samples,
        n_topologies: plan.n_topologies,
        n_fading: plan.n_fading,
    })
}

/// Empirical CDF of long-run user rates under round-robin scheduling among
/// every user associated with the measured cluster(s).
pub fn user_rate_cdf(plan: &SimPlan, config: &SystemConfig) -> Result<Vec<(f64, f64)>> {
    let plan = SimPlan {
        scheduler: Scheduler::RoundRobin,
        ..plan.clone()
    };
    let res = run(&plan, config)?;
    Ok(empirical_cdf(&res.user_rate_samples))
}

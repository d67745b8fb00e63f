//! Per-topology deployment: BS placement, cooperation sets and user pools.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::streams::{substream, TAG_BS, TAG_POOL};
use super::{Association, BsCountModel, Scenario, SimPlan};
use crate::channel::PathLossParams;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::{assign_to_cluster, build_hex_lattice, HexLattice, Point2D, Topology};

/// One cooperation set: its BSs, the region users are drawn from, and
/// (in pool mode) the users associated with it.
#[derive(Debug, Clone)]
pub(crate) struct Cluster {
    pub bs: Vec<Point2D>,
    pub center: Point2D,
    pub region: usize,
    pub measured: bool,
    pub pool: Vec<Point2D>,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub clusters: Vec<Cluster>,
    pub lattice: HexLattice,
    pub pooled: bool,
}

impl Layout {
    pub fn measured_bs(&self) -> usize {
        self.clusters.iter().filter(|c| c.measured).map(|c| c.bs.len()).sum()
    }
}

pub(crate) fn lattice_for(plan: &SimPlan, config: &SystemConfig) -> Result<HexLattice> {
    match plan.scenario {
        Scenario::IsolatedCell => HexLattice::with_area(1.0 / config.lambda, 0),
        Scenario::IsolatedCluster => build_hex_lattice(plan.avg_cluster_size, config.lambda, 0),
        Scenario::FullNetwork | Scenario::SingleCellProcessing => {
            build_hex_lattice(plan.avg_cluster_size, config.lambda, plan.layers)
        }
    }
}

/// BS deployment of one topology attempt, with per-hexagon streams.
pub(crate) fn deploy(plan: &SimPlan, config: &SystemConfig, t: u64, attempt: u64) -> Result<Topology> {
    let lattice = lattice_for(plan, config)?;
    if plan.scenario == Scenario::IsolatedCell {
        return Ok(Topology {
            bs_points: vec![lattice.center_offsets[0]],
            cluster_of_bs: vec![0],
            users: vec![Vec::new()],
            lattice,
        });
    }
    let rng_of = |c: usize| substream(plan.seed, TAG_BS, t, attempt, c as u64);
    match plan.bs_count_model {
        BsCountModel::Poisson => Topology::poisson_by_cell(lattice, config.lambda, rng_of),
        BsCountModel::FixedPerCluster => {
            let per = (plan.avg_cluster_size.round() as usize).max(1);
            let mut bs_points = Vec::new();
            let mut cluster_of_bs = Vec::new();
            for c in 0..lattice.len() {
                let mut rng = rng_of(c);
                for _ in 0..per {
                    bs_points.push(lattice.sample_in(c, &mut rng));
                    cluster_of_bs.push(c);
                }
            }
            let users = vec![Vec::new(); lattice.len()];
            Ok(Topology {
                bs_points,
                cluster_of_bs,
                users,
                lattice,
            })
        }
    }
}

/// Cluster index for each user.
///
/// Location-based: the hexagon containing the user. Channel-based: the
/// cluster with the largest path-loss sum `Σ_b β_b`; ties (including users
/// that see no BS at all) stay with the location-based cluster.
pub fn associate_users(
    topology: &Topology,
    users: &[Point2D],
    pathloss: &PathLossParams,
    mode: Association,
) -> Result<Vec<usize>> {
    let by_cluster = topology.bs_by_cluster();
    users
        .iter()
        .map(|&u| {
            let home = assign_to_cluster(&topology.lattice, u)?;
            if mode == Association::LocationBased {
                return Ok(home);
            }
            let strength = |c: usize| -> f64 {
                by_cluster[c]
                    .iter()
                    .map(|&b| pathloss.gain(u.dist(&topology.bs_points[b])))
                    .sum()
            };
            let mut best = (home, strength(home));
            for c in 0..by_cluster.len() {
                let s = strength(c);
                if s > best.1 {
                    best = (c, s);
                }
            }
            Ok(best.0)
        })
        .collect()
}

fn nearest(points: &[Point2D], u: &Point2D) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, p) in points.iter().enumerate() {
        let d = p.dist(u);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Users of one topology attempt at `user_density_factor · λ`, drawn per hexagon.
fn user_population(plan: &SimPlan, config: &SystemConfig, lattice: &HexLattice, t: u64, attempt: u64) -> Result<Vec<Vec<Point2D>>> {
    let mean = config.user_density_factor * config.lambda * lattice.cell_area;
    let count = Poisson::new(mean).map_err(|e| Error::param("user_density_factor", e.to_string()))?;
    Ok((0..lattice.len())
        .map(|c| {
            let mut rng = substream(plan.seed, TAG_POOL, t, attempt, c as u64);
            let n = count.sample(&mut rng) as usize;
            (0..n).map(|_| lattice.sample_in(c, &mut rng)).collect()
        })
        .collect())
}

/// Cooperation sets of one topology attempt; `None` when the measured set
/// has no BS (the caller redraws).
pub(crate) fn build_layout(plan: &SimPlan, config: &SystemConfig, t: u64, attempt: u64) -> Result<Option<Layout>> {
    let topo = deploy(plan, config, t, attempt)?;
    let pooled = plan.pooled();
    let mut clusters: Vec<Cluster> = if plan.scenario == Scenario::SingleCellProcessing {
        topo.bs_points
            .iter()
            .zip(&topo.cluster_of_bs)
            .map(|(&p, &c)| Cluster {
                bs: vec![p],
                center: p,
                region: c,
                measured: c == 0,
                pool: Vec::new(),
            })
            .collect()
    } else {
        topo.bs_by_cluster()
            .into_iter()
            .enumerate()
            .map(|(c, members)| Cluster {
                bs: members.iter().map(|&b| topo.bs_points[b]).collect(),
                center: topo.lattice.center_offsets[c],
                region: c,
                measured: c == 0,
                pool: Vec::new(),
            })
            .collect()
    };
    if !clusters.iter().any(|c| c.measured && !c.bs.is_empty()) {
        return Ok(None);
    }
    if pooled {
        let pl = config.pathloss();
        for (home, users) in user_population(plan, config, &topo.lattice, t, attempt)?.into_iter().enumerate() {
            let owners: Vec<usize> = if plan.scenario == Scenario::SingleCellProcessing {
                users.iter().map(|u| nearest(&topo.bs_points, u)).collect()
            } else if plan.association == Association::ChannelBased {
                associate_users(&topo, &users, &pl, Association::ChannelBased)?
            } else {
                vec![home; users.len()]
            };
            for (u, owner) in users.into_iter().zip(owners) {
                clusters[owner].pool.push(u);
            }
        }
    }
    Ok(Some(Layout {
        clusters,
        lattice: topo.lattice,
        pooled,
    }))
}

/// A user uniform in hexagon `region`, or at `distance` from `center` with a uniform bearing.
pub(crate) fn fresh_user<R: Rng + ?Sized>(
    lattice: &HexLattice,
    region: usize,
    center: Point2D,
    distance: Option<f64>,
    rng: &mut R,
) -> Point2D {
    match distance {
        Some(d) => center + Point2D::polar(d, rng.random_range(0.0..std::f64::consts::TAU)),
        None => lattice.sample_in(region, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HexLattice;

    #[test]
    fn channel_based_can_override_location() {
        // The user sits just inside hexagon 0, next to a BS just inside hexagon 1.
        let lattice = HexLattice::with_area(1e6, 1).unwrap();
        let c1 = lattice.center_offsets[1];
        let far0 = Point2D::new(-400.0, 0.0);
        let near1 = Point2D::new(c1.x * 0.51, c1.y * 0.51);
        let topo = Topology {
            bs_points: vec![far0, near1],
            cluster_of_bs: vec![0, 1],
            users: vec![Vec::new(); lattice.len()],
            lattice,
        };
        assert_eq!(assign_to_cluster(&topo.lattice, near1).unwrap(), 1);
        let user = Point2D::new(c1.x * 0.49, c1.y * 0.49);
        let pl = PathLossParams::new(0.392, 3.76).unwrap();
        let loc = associate_users(&topo, &[user], &pl, Association::LocationBased).unwrap();
        let chan = associate_users(&topo, &[user], &pl, Association::ChannelBased).unwrap();
        assert_eq!(loc, vec![0]);
        assert_eq!(chan, vec![1]);
        // A user at the center hexagon's middle next to its own BS stays put.
        let center_user = Point2D::new(-390.0, 0.0);
        let both = associate_users(&topo, &[center_user], &pl, Association::ChannelBased).unwrap();
        assert_eq!(both, vec![0]);
    }
}

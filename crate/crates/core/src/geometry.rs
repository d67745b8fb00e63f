//! PPP deployments, the hexagonal cluster tessellation, and cluster-disk geometry.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dist(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Add for Point2D {
    type Output = Point2D;
    fn add(self, o: Point2D) -> Point2D {
        Point2D::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2D {
    type Output = Point2D;
    fn sub(self, o: Point2D) -> Point2D {
        Point2D::new(self.x - o.x, self.y - o.y)
    }
}

/// Axis-aligned sampling window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn centered(width: f64, height: f64) -> Self {
        Self::new(-width / 2.0, width / 2.0, -height / 2.0, height / 2.0)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2D {
        Point2D::new(
            rng.random_range(self.x_min..self.x_max),
            rng.random_range(self.y_min..self.y_max),
        )
    }
}

/// Homogeneous PPP of the given density restricted to `window`.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window: &Rect, rng: &mut R) -> Result<Vec<Point2D>> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::param("density", format!("must be positive, got {density}")));
    }
    let area = window.area();
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::param("window", format!("area must be positive, got {area}")));
    }
    let mean = density * area;
    let count = Poisson::new(mean)
        .map_err(|e| Error::param("density", e.to_string()))?
        .sample(rng) as usize;
    Ok((0..count).map(|_| window.sample(rng)).collect())
}

/// Flat-topped hexagonal tessellation: a center hexagon plus `layers` rings.
///
/// Index 0 is the center hexagon; further indices go ring by ring.
#[derive(Debug, Clone)]
pub struct HexLattice {
    pub cell_area: f64,
    pub circumradius: f64,
    pub layers: usize,
    pub center_offsets: Vec<Point2D>,
    axial: Vec<(i64, i64)>,
    index_of: HashMap<(i64, i64), usize>,
}

const AXIAL_DIRS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

fn hex_distance(q: i64, r: i64) -> i64 {
    (q.abs() + r.abs() + (q + r).abs()) / 2
}

/// Hexagon tessellation whose cells have area `avg_cluster_size / density`.
pub fn build_hex_lattice(avg_cluster_size: f64, density: f64, layers: usize) -> Result<HexLattice> {
    if !(avg_cluster_size >= 1.0) {
        return Err(Error::param(
            "avg_cluster_size",
            format!("must be at least 1, got {avg_cluster_size}"),
        ));
    }
    if !(density > 0.0) {
        return Err(Error::param("density", format!("must be positive, got {density}")));
    }
    HexLattice::with_area(avg_cluster_size / density, layers)
}

impl HexLattice {
    pub fn with_area(cell_area: f64, layers: usize) -> Result<Self> {
        if !(cell_area > 0.0 && cell_area.is_finite()) {
            return Err(Error::param("cell_area", format!("must be positive, got {cell_area}")));
        }
        let circumradius = (2.0 * cell_area / (3.0 * SQRT3)).sqrt();
        let mut axial = vec![(0i64, 0i64)];
        for ring in 1..=layers as i64 {
            // walk the ring starting from direction 4 scaled by the radius
            let (mut q, mut r) = (AXIAL_DIRS[4].0 * ring, AXIAL_DIRS[4].1 * ring);
            for dir in AXIAL_DIRS {
                for _ in 0..ring {
                    axial.push((q, r));
                    q += dir.0;
                    r += dir.1;
                }
            }
        }
        let center_offsets = axial
            .iter()
            .map(|&(q, r)| axial_to_point(q, r, circumradius))
            .collect();
        let index_of = axial.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        Ok(Self {
            cell_area,
            circumradius,
            layers,
            center_offsets,
            axial,
            index_of,
        })
    }

    pub fn len(&self) -> usize {
        self.center_offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.center_offsets.is_empty()
    }

    /// Bounding box of the tessellation padded by one circumradius.
    pub fn simulation_window(&self) -> Rect {
        let pad = 2.0 * self.circumradius;
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for c in &self.center_offsets {
            x0 = x0.min(c.x);
            x1 = x1.max(c.x);
            y0 = y0.min(c.y);
            y1 = y1.max(c.y);
        }
        Rect::new(x0 - pad, x1 + pad, y0 - pad, y1 + pad)
    }

    /// Whether `p` lies in (or on the boundary of) hexagon `idx`.
    pub fn contains(&self, idx: usize, p: &Point2D) -> bool {
        let c = self.center_offsets[idx];
        in_flat_hexagon(p.x - c.x, p.y - c.y, self.circumradius, 1e-9)
    }

    /// Uniform point inside hexagon `idx` (rejection from the bounding box).
    pub fn sample_in<R: Rng + ?Sized>(&self, idx: usize, rng: &mut R) -> Point2D {
        let c = self.center_offsets[idx];
        let s = self.circumradius;
        let h = SQRT3 / 2.0 * s;
        loop {
            let dx = rng.random_range(-s..s);
            let dy = rng.random_range(-h..h);
            if in_flat_hexagon(dx, dy, s, 0.0) {
                return Point2D::new(c.x + dx, c.y + dy);
            }
        }
    }
}

fn axial_to_point(q: i64, r: i64, s: f64) -> Point2D {
    Point2D::new(1.5 * s * q as f64, SQRT3 * s * (r as f64 + q as f64 / 2.0))
}

fn in_flat_hexagon(dx: f64, dy: f64, s: f64, tol: f64) -> bool {
    let (ax, ay) = (dx.abs(), dy.abs());
    let slack = tol * s;
    ay <= SQRT3 / 2.0 * s + slack && SQRT3 * ax + ay <= SQRT3 * s + slack
}

/// Index of the unique hexagon containing `p`.
///
/// Boundary points go to the candidate whose center is lexicographically
/// smallest in (x, y).
pub fn assign_to_cluster(lattice: &HexLattice, p: Point2D) -> Result<usize> {
    if !(p.x.is_finite() && p.y.is_finite()) {
        return Err(Error::OutOfRegion { x: p.x, y: p.y });
    }
    let s = lattice.circumradius;
    let qf = (2.0 / 3.0) * p.x / s;
    let rf = (-p.x / 3.0 + SQRT3 / 3.0 * p.y) / s;
    let (q0, r0) = cube_round(qf, rf);
    let mut best: Option<usize> = None;
    for (dq, dr) in std::iter::once((0, 0)).chain(AXIAL_DIRS) {
        let key = (q0 + dq, r0 + dr);
        let Some(&idx) = lattice.index_of.get(&key) else {
            continue;
        };
        if !lattice.contains(idx, &p) {
            continue;
        }
        best = match best {
            None => Some(idx),
            Some(b) => {
                let (cb, ci) = (lattice.center_offsets[b], lattice.center_offsets[idx]);
                if (ci.x, ci.y) < (cb.x, cb.y) {
                    Some(idx)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.ok_or(Error::OutOfRegion { x: p.x, y: p.y })
}

fn cube_round(qf: f64, rf: f64) -> (i64, i64) {
    let sf = -qf - rf;
    let (mut q, mut r, s) = (qf.round(), rf.round(), sf.round());
    let (dq, dr, ds) = ((q - qf).abs(), (r - rf).abs(), (s - sf).abs());
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    (q as i64, r as i64)
}

impl HexLattice {
    /// Ring number (hex distance from the center hexagon) of cluster `idx`.
    pub fn ring_of(&self, idx: usize) -> usize {
        let (q, r) = self.axial[idx];
        hex_distance(q, r) as usize
    }
}

/// Equal-area circular approximation of a cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterGeometry {
    pub radius: f64,
    pub avg_bs_count: f64,
}

impl ClusterGeometry {
    pub fn new(avg_cluster_size: f64, density: f64) -> Result<Self> {
        Ok(Self {
            radius: cluster_radius(avg_cluster_size, density)?,
            avg_bs_count: avg_cluster_size,
        })
    }
}

/// Radius of the disk with area `avg_cluster_size / density`.
pub fn cluster_radius(avg_cluster_size: f64, density: f64) -> Result<f64> {
    if !(avg_cluster_size >= 1.0) {
        return Err(Error::param(
            "avg_cluster_size",
            format!("must be at least 1, got {avg_cluster_size}"),
        ));
    }
    if !(density > 0.0) {
        return Err(Error::param("density", format!("must be positive, got {density}")));
    }
    Ok((avg_cluster_size / (density * PI)).sqrt())
}

/// Distance from a user at radius `d` to the cluster-disk boundary along direction `theta`.
pub fn boundary_distance(d: f64, theta: f64, radius: f64) -> Result<f64> {
    if !(d >= 0.0 && d <= radius) {
        return Err(Error::param(
            "d",
            format!("user distance {d} must lie in [0, {radius}]"),
        ));
    }
    Ok(boundary_distance_unchecked(d, theta, radius))
}

#[inline]
pub(crate) fn boundary_distance_unchecked(d: f64, theta: f64, radius: f64) -> f64 {
    let c = d * theta.cos();
    (radius * radius - c * c).max(0.0).sqrt() + d * theta.sin()
}

/// Distance of a uniform user in a disk of radius `radius` from its center.
pub fn sample_user_distance<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> f64 {
    user_distance_from_uniform(radius, rng.random::<f64>())
}

pub fn user_distance_from_uniform(radius: f64, u: f64) -> f64 {
    radius * u.sqrt()
}

/// BS deployment over a hexagonal tessellation plus per-cluster users.
#[derive(Debug, Clone)]
pub struct Topology {
    pub bs_points: Vec<Point2D>,
    pub cluster_of_bs: Vec<usize>,
    pub users: Vec<Vec<Point2D>>,
    pub lattice: HexLattice,
}

impl Topology {
    /// PPP deployment of the given density over the tessellation window; BSs
    /// falling outside every hexagon are discarded.
    pub fn poisson<R: Rng + ?Sized>(lattice: HexLattice, density: f64, rng: &mut R) -> Result<Self> {
        let window = lattice.simulation_window();
        let mut bs_points = Vec::new();
        let mut cluster_of_bs = Vec::new();
        for p in sample_ppp(density, &window, rng)? {
            if let Ok(c) = assign_to_cluster(&lattice, p) {
                bs_points.push(p);
                cluster_of_bs.push(c);
            }
        }
        let users = vec![Vec::new(); lattice.len()];
        Ok(Self {
            bs_points,
            cluster_of_bs,
            users,
            lattice,
        })
    }

    /// PPP restricted to the tessellation, drawn hexagon by hexagon: a
    /// Poisson count with mean `density · cell_area` per hexagon, placed
    /// uniformly. `rng_of(c)` supplies hexagon c's random stream, so the BSs
    /// of a hexagon do not depend on how many other hexagons exist.
    pub fn poisson_by_cell<R, F>(lattice: HexLattice, density: f64, mut rng_of: F) -> Result<Self>
    where
        R: Rng,
        F: FnMut(usize) -> R,
    {
        if !(density > 0.0 && density.is_finite()) {
            return Err(Error::param("density", format!("must be positive, got {density}")));
        }
        let count = Poisson::new(density * lattice.cell_area).map_err(|e| Error::param("density", e.to_string()))?;
        let mut bs_points = Vec::new();
        let mut cluster_of_bs = Vec::new();
        for c in 0..lattice.len() {
            let mut rng = rng_of(c);
            let n = count.sample(&mut rng) as usize;
            for _ in 0..n {
                bs_points.push(lattice.sample_in(c, &mut rng));
                cluster_of_bs.push(c);
            }
        }
        let users = vec![Vec::new(); lattice.len()];
        Ok(Self {
            bs_points,
            cluster_of_bs,
            users,
            lattice,
        })
    }

    /// Exactly `per_cluster` BSs uniformly placed in every hexagon.
    pub fn fixed<R: Rng + ?Sized>(lattice: HexLattice, per_cluster: usize, rng: &mut R) -> Self {
        let mut bs_points = Vec::new();
        let mut cluster_of_bs = Vec::new();
        for c in 0..lattice.len() {
            for _ in 0..per_cluster {
                bs_points.push(lattice.sample_in(c, rng));
                cluster_of_bs.push(c);
            }
        }
        let users = vec![Vec::new(); lattice.len()];
        Self {
            bs_points,
            cluster_of_bs,
            users,
            lattice,
        }
    }

    /// BS indices grouped per cluster.
    pub fn bs_by_cluster(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.lattice.len()];
        for (b, &c) in self.cluster_of_bs.iter().enumerate() {
            out[c].push(b);
        }
        out
    }

    pub fn cluster_size(&self, cluster: usize) -> usize {
        self.cluster_of_bs.iter().filter(|&&c| c == cluster).count()
    }
}

/// Scheduled users in a cluster with `bs_count` BSs at loading `eta`.
///
/// The cluster under study always serves at least one user when it has a BS.
pub fn scheduled_users(eta: f64, antennas: usize, bs_count: usize, serving: bool) -> usize {
    if bs_count == 0 {
        return 0;
    }
    let dims = antennas * bs_count;
    let k = (eta * dims as f64).round() as usize;
    let k = k.min(dims);
    if serving {
        k.max(1)
    } else {
        k
    }
}

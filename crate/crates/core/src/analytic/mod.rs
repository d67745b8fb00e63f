//! Closed-form per-BS ergodic sum rate of a clustered network MIMO downlink
//! with ZF beamforming, its bounds, and the loading-factor search.
//!
//! The rate of a user at distance `d` from the cluster center is
//!
//! ```text
//! R(d) = ∫₀^∞ e^{-zΓ}/z · M_I(z) · (1 − M_S(z)) dz          [nats]
//! ```
//!
//! where `M_I` and `M_S` are the PPP Laplace functionals of the aggregate
//! out-of-cluster interference and of the in-cluster signal power, each an
//! angular integral of radial kernels. The per-BS rate is `ηM · E_d[R(d)]`
//! with `d` distributed as `2d/R_c²` on `[0, R_c]`.

mod bounds;
mod kernels;
mod loading;
mod rate;

pub use bounds::{asymptotic_upper_bound, expected_channel_strength_bound, finite_rc_signal_bound};
pub use kernels::{
    interference_mgf_exponent, interference_radial_integral, psi_i, psi_ii, signal_mgf_exponent,
    signal_radial_integral, upsilon_i, upsilon_ii, KernelPath,
};
pub use loading::{eta_grid, optimal_loading_factor, LoadingCurve};
pub use rate::{
    ergodic_rate_at_distance, isolated_cell_rate, isolated_cell_user_rate, log1p_via_laplace,
    per_bs_ergodic_sum_rate,
    per_bs_ergodic_sum_rate_with,
};

use crate::config::{fnv1a, SystemConfig};
use crate::error::{Error, Result};
use crate::gamma_matching::averaged_signal_shape;
use crate::geometry::cluster_radius;

/// Parameters of one analytic rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AnalyticParams {
    pub lambda: f64,
    pub antennas: usize,
    pub eta: f64,
    pub avg_cluster_size: f64,
    /// Linear per-beam SNR `P_T/(ηMσ²)`.
    pub rho: f64,
    /// Linear SNR gap.
    pub gap: f64,
    pub alpha: f64,
    pub d_o: f64,
    pub cluster_radius: f64,
    /// Shape of the averaged signal multiplier, `(MB̄(1-η)+1)/B̄`.
    pub varpi: f64,
    /// `false` drops all out-of-cluster interference (isolated cluster).
    pub interference: bool,
}

impl AnalyticParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda: f64,
        antennas: usize,
        eta: f64,
        avg_cluster_size: f64,
        rho: f64,
        gap: f64,
        alpha: f64,
        d_o: f64,
    ) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::param("eta", format!("must lie in (0, 1], got {eta}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::param("rho", format!("must be positive, got {rho}")));
        }
        if !(gap >= 1.0) {
            return Err(Error::param("gap", format!("linear SNR gap must be ≥ 1, got {gap}")));
        }
        if !(alpha > 2.0) {
            return Err(Error::param("alpha", format!("α > 2 required, got {alpha}")));
        }
        if !(d_o > 0.0) {
            return Err(Error::param("d_o", format!("must be positive, got {d_o}")));
        }
        if antennas == 0 {
            return Err(Error::param("antennas", "need at least one antenna"));
        }
        let radius = cluster_radius(avg_cluster_size, lambda)?;
        Ok(Self {
            lambda,
            antennas,
            eta,
            avg_cluster_size,
            rho,
            gap,
            alpha,
            d_o,
            cluster_radius: radius,
            varpi: averaged_signal_shape(antennas, avg_cluster_size, eta),
            interference: true,
        })
    }

    /// Parameters for loading `eta` and mean cluster size `avg_cluster_size`
    /// under `config`, with `ρ` recomputed for that loading.
    pub fn from_config(config: &SystemConfig, eta: f64, avg_cluster_size: f64) -> Result<Self> {
        Self::new(
            config.lambda,
            config.antennas,
            eta,
            avg_cluster_size,
            config.rho(eta),
            config.gap_linear(),
            config.alpha,
            config.d_o,
        )
    }

    pub fn isolated(mut self) -> Self {
        self.interference = false;
        self
    }

    /// Number of beams per BS, `ηM`.
    pub fn beams_per_bs(&self) -> f64 {
        self.eta * self.antennas as f64
    }

    pub fn digest(&self) -> String {
        format!("{:016x}", fnv1a(format!("{self:?}").as_bytes()))
    }
}

/// Integration controls for the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    /// Maximum number of adaptive subintervals for the z-integral.
    pub z_nodes: usize,
    /// Periodic trapezoid nodes over θ ∈ [0, 2π).
    pub theta_nodes: usize,
    /// Gauss–Legendre nodes over the user distance.
    pub d_nodes: usize,
    /// Relative tolerance of the direct radial integrals.
    pub radial_rel_tol: f64,
    /// Relative tolerance of the z-integral that yields each rate.
    pub rate_rel_tol: f64,
    /// The radial tail is linearized beyond `tail_split · l_θ` (or further
    /// out, where the integrand is already linear to 1e-9).
    pub tail_split: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            z_nodes: 200,
            theta_nodes: 64,
            d_nodes: 24,
            radial_rel_tol: 1e-6,
            rate_rel_tol: 1e-4,
            tail_split: 10.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("z_nodes", self.z_nodes),
            ("theta_nodes", self.theta_nodes),
            ("d_nodes", self.d_nodes),
        ] {
            if n < 8 {
                return Err(Error::param(name, format!("need at least 8 nodes, got {n}")));
            }
        }
        if !(self.radial_rel_tol > 0.0 && self.rate_rel_tol > 0.0 && self.tail_split >= 1.0) {
            return Err(Error::param("quadrature", "tolerances must be positive and tail_split ≥ 1"));
        }
        Ok(())
    }

    /// Same node budget with the rate tolerance set to `tol` and the kernel
    /// tolerance kept at least 100× tighter.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.rate_rel_tol = tol;
        self.radial_rel_tol = self.radial_rel_tol.min(tol * 1e-2);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RateMethod {
    #[serde(rename = "analytic-2F1")]
    AnalyticHypergeometric,
    #[serde(rename = "analytic-quadrature")]
    AnalyticQuadrature,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

impl RateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateMethod::AnalyticHypergeometric => "analytic-2F1",
            RateMethod::AnalyticQuadrature => "analytic-quadrature",
            RateMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// A rate in bits/s/Hz per BS with its provenance.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RateResult {
    pub value: f64,
    pub method: RateMethod,
    pub ci_halfwidth: f64,
    pub params_digest: String,
}

//! Second-order Gamma moment matching and the surrogate chain for signal and
//! inter-cluster interference powers.
//!
//! All Gamma laws use the shape/scale convention: mean `kθ`, variance `kθ²`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::param("shape", format!("must be positive, got {shape}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param("scale", format!("must be positive, got {scale}")));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// `E[exp(-s X)] = (1 + sθ)^{-k}`.
    pub fn mgf_neg(&self, s: f64) -> f64 {
        (1.0 + s * self.scale).powf(-self.shape)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        use statrs::distribution::ContinuousCDF;
        statrs::distribution::Gamma::new(self.shape, 1.0 / self.scale)
            .map(|g| g.cdf(x))
            .unwrap_or(f64::NAN)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Gamma::new(self.shape, self.scale)
            .expect("validated gamma parameters")
            .sample(rng)
    }
}

/// Matched intended and per-cluster interference channel strengths for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedChannelStats {
    pub intended: GammaParams,
    pub interferers: Vec<GammaParams>,
}

/// Single Gamma law with the same mean and variance as a sum of independent Gammas.
pub fn moment_match(components: &[GammaParams]) -> Result<GammaParams> {
    if components.is_empty() {
        return Err(Error::param("components", "need at least one Gamma component"));
    }
    let m1: f64 = components.iter().map(|c| c.shape * c.scale).sum();
    let m2: f64 = components.iter().map(|c| c.shape * c.scale * c.scale).sum();
    GammaParams::new(m1 * m1 / m2, m2 / m1)
}

fn channel_strength_params(pathlosses: &[f64], antennas: usize) -> Result<GammaParams> {
    if pathlosses.is_empty() {
        return Err(Error::param("pathlosses", "need at least one BS"));
    }
    if let Some(b) = pathlosses.iter().find(|&&b| !(b > 0.0 && b <= 1.0)) {
        return Err(Error::param("pathlosses", format!("β must lie in (0, 1], got {b}")));
    }
    let s1: f64 = pathlosses.iter().sum();
    let s2: f64 = pathlosses.iter().map(|b| b * b).sum();
    GammaParams::new(antennas as f64 * s1 * s1 / s2, s2 / s1)
}

/// Matched law of `‖g‖²` for the stacked intended channel.
pub fn intended_channel_params(pathlosses: &[f64], antennas: usize) -> Result<GammaParams> {
    channel_strength_params(pathlosses, antennas)
}

/// Matched law of `‖f‖²` for the stacked channel from one interfering cluster.
pub fn interference_channel_params(pathlosses: &[f64], antennas: usize) -> Result<GammaParams> {
    channel_strength_params(pathlosses, antennas)
}

/// Diversity order `MB(1-η) + 1` left to each ZF user.
pub fn diversity_order(antennas: usize, bs_count: f64, eta: f64) -> f64 {
    antennas as f64 * bs_count * (1.0 - eta) + 1.0
}

/// ZF signal power law: shape `k·(MB(1-η)+1)/(MB)`, scale `θ`.
pub fn signal_power_params(
    intended: &GammaParams,
    antennas: usize,
    bs_count: usize,
    eta: f64,
) -> Result<GammaParams> {
    check_eta(eta)?;
    let dims = (antennas * bs_count) as f64;
    let zeta = diversity_order(antennas, bs_count as f64, eta);
    GammaParams::new(intended.shape * zeta / dims, intended.scale)
}

/// Power leaked through a single interfering beam: shape `k/(MB)`, scale `θ`.
pub fn interference_beam_power_params(
    interf: &GammaParams,
    antennas: usize,
    bs_count: usize,
) -> Result<GammaParams> {
    let dims = (antennas * bs_count) as f64;
    GammaParams::new(interf.shape / dims, interf.scale)
}

/// Aggregate power from all `ηMB` beams of an interfering cluster, beams
/// treated as orthogonal: shape `η k`, scale `θ`.
pub fn aggregate_interference_params(interf: &GammaParams, eta: f64) -> Result<GammaParams> {
    check_eta(eta)?;
    GammaParams::new(eta * interf.shape, interf.scale)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("loading factor must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// Shape of the per-BS signal multiplier with the cluster size replaced by its mean.
pub fn averaged_signal_shape(antennas: usize, avg_cluster_size: f64, eta: f64) -> f64 {
    diversity_order(antennas, avg_cluster_size, eta) / avg_cluster_size
}

/// How the signal multiplier is shared across the serving BSs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalMultiplier {
    /// One draw multiplies the whole path-loss sum.
    #[default]
    Shared,
    /// An independent draw per serving BS.
    PerBs,
}

/// Sample of the decomposed signal-power surrogate `Σ_b β_b κ̃` with
/// `κ̃ ~ Γ((MB̄(1-η)+1)/B̄, 1)`.
pub fn decomposed_signal_surrogate<R: Rng + ?Sized>(
    pathlosses: &[f64],
    antennas: usize,
    avg_cluster_size: f64,
    eta: f64,
    mode: SignalMultiplier,
    rng: &mut R,
) -> Result<f64> {
    check_eta(eta)?;
    if !(avg_cluster_size >= 1.0) {
        return Err(Error::param(
            "avg_cluster_size",
            format!("must be at least 1, got {avg_cluster_size}"),
        ));
    }
    let kappa = GammaParams::new(averaged_signal_shape(antennas, avg_cluster_size, eta), 1.0)?;
    Ok(match mode {
        SignalMultiplier::Shared => kappa.sample(rng) * pathlosses.iter().sum::<f64>(),
        SignalMultiplier::PerBs => pathlosses.iter().map(|b| b * kappa.sample(rng)).sum(),
    })
}

/// Sample of the per-BS signal surrogate `Σ_b β_b κ_b`, `κ_b ~ Γ((MB(1-η)+1)/B, 1)`
/// using the actual cluster size `B`.
pub fn per_bs_signal_surrogate<R: Rng + ?Sized>(
    pathlosses: &[f64],
    antennas: usize,
    eta: f64,
    rng: &mut R,
) -> Result<f64> {
    check_eta(eta)?;
    let b = pathlosses.len() as f64;
    let kappa = GammaParams::new(diversity_order(antennas, b, eta) / b, 1.0)?;
    Ok(pathlosses.iter().map(|beta| beta * kappa.sample(rng)).sum())
}

/// Sample of `Σ_m β_m ψ_m` with independent `ψ_m ~ Γ(ηM, 1)`.
pub fn decomposed_interference_surrogate<R: Rng + ?Sized>(
    pathlosses: &[f64],
    antennas: usize,
    eta: f64,
    rng: &mut R,
) -> Result<f64> {
    check_eta(eta)?;
    let psi = GammaParams::new(eta * antennas as f64, 1.0)?;
    Ok(pathlosses.iter().map(|b| b * psi.sample(rng)).sum())
}

//! Closed-form upper bounds on channel strength, signal power and rate.

use std::f64::consts::PI;

use super::AnalyticParams;

fn pathloss_mass(p: &AnalyticParams) -> f64 {
    // ∫₀^∞ (1 + r/d_o)^{-α} r dr = d_o² / ((α−1)(α−2))
    p.d_o * p.d_o / ((p.alpha - 1.0) * (p.alpha - 2.0))
}

/// Rate ceiling as the cluster grows without bound:
/// `ηM log₂(1 + 2ρMλπ d_o²(1−η) / (Γ(α−1)(α−2)))`.
pub fn asymptotic_upper_bound(p: &AnalyticParams) -> f64 {
    let m = p.antennas as f64;
    let snr = 2.0 * p.rho * m * p.lambda * PI * (1.0 - p.eta) * pathloss_mass(p) / p.gap;
    p.beams_per_bs() * snr.ln_1p() / std::f64::consts::LN_2
}

/// Upper bound on `E‖g‖²` of the stacked channel seen from the network:
/// `2Mλπ d_o² / ((α−1)(α−2))`.
pub fn expected_channel_strength_bound(p: &AnalyticParams) -> f64 {
    2.0 * p.antennas as f64 * p.lambda * PI * pathloss_mass(p)
}

/// Upper bound on the expected ZF signal power `E|gᴴw|²` of a cluster-center
/// user at finite cluster radius.
pub fn finite_rc_signal_bound(p: &AnalyticParams) -> f64 {
    let rc = p.cluster_radius;
    2.0 * pathloss_mass(p) / (rc * rc)
        + 2.0 * p.antennas as f64 * p.lambda * PI * (1.0 - p.eta) * pathloss_mass(p)
}

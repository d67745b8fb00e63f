//! Radial kernels of the interference and signal Laplace functionals.
//!
//! With `L = 1 + l_θ/d_o` and `l_θ` the distance from the user to the
//! cluster boundary along θ:
//!
//! ```text
//! Ψ_I  = d_o² L²/2 · [F(ηM, 2/α; ρzΓ L^{-α}) − 1]
//! Ψ_II = d_o² L    · [F(ηM, 1/α; ρzΓ L^{-α}) − 1]
//! Υ_I  = d_o² L²/2 · [1 − F(ϖ, 2/α; ρz L^{-α})] − d_o²/2 · [1 − F(ϖ, 2/α; ρz)]
//! Υ_II = d_o² L    · [1 − F(ϖ, 1/α; ρz L^{-α})] − d_o²   · [1 − F(ϖ, 1/α; ρz)]
//! ```
//!
//! where `F(a, δ; x) = ₂F₁(a, −δ; 1−δ; −x)`. `Ψ_I − Ψ_II` equals minus the
//! radial integral `∫_{l_θ}^∞ ((1 + ρzΓ β(r))^{-ηM} − 1) r dr` and
//! `Υ_I − Υ_II` equals minus `∫_0^{l_θ} ((1 + ρz β(r))^{-ϖ} − 1) r dr`; the
//! latter forms are evaluated directly as an independent path.

use std::f64::consts::PI;

use super::{AnalyticParams, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::{boundary_distance, boundary_distance_unchecked};
use crate::quadrature::gauss_kronrod;
use crate::special::hyp2f1_neg_b_m1;

/// How the radial kernels are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelPath {
    /// Closed form through the incomplete-beta ₂F₁ reduction.
    #[default]
    Hypergeometric,
    /// Adaptive quadrature of the radial integrals.
    RadialQuadrature,
}

/// Integrand magnitude below which the radial tail is treated as linear.
const LINEAR_TAIL: f64 = 1e-9;
const RADIAL_MAX_INTERVALS: usize = 400;

#[inline]
fn big_l(d: f64, theta: f64, p: &AnalyticParams) -> f64 {
    1.0 + boundary_distance_unchecked(d, theta, p.cluster_radius) / p.d_o
}

pub fn psi_i(d: f64, theta: f64, z: f64, p: &AnalyticParams) -> f64 {
    let l = big_l(d, theta, p);
    let x = p.rho * z * p.gap * l.powf(-p.alpha);
    p.d_o * p.d_o * l * l / 2.0 * hyp2f1_neg_b_m1(p.beams_per_bs(), 2.0 / p.alpha, x)
}

pub fn psi_ii(d: f64, theta: f64, z: f64, p: &AnalyticParams) -> f64 {
    let l = big_l(d, theta, p);
    let x = p.rho * z * p.gap * l.powf(-p.alpha);
    p.d_o * p.d_o * l * hyp2f1_neg_b_m1(p.beams_per_bs(), 1.0 / p.alpha, x)
}

pub fn upsilon_i(d: f64, theta: f64, z: f64, p: &AnalyticParams) -> f64 {
    let l = big_l(d, theta, p);
    let delta = 2.0 / p.alpha;
    let x = p.rho * z;
    let d2 = p.d_o * p.d_o;
    -d2 * l * l / 2.0 * hyp2f1_neg_b_m1(p.varpi, delta, x * l.powf(-p.alpha))
        + d2 / 2.0 * hyp2f1_neg_b_m1(p.varpi, delta, x)
}

pub fn upsilon_ii(d: f64, theta: f64, z: f64, p: &AnalyticParams) -> f64 {
    let l = big_l(d, theta, p);
    let delta = 1.0 / p.alpha;
    let x = p.rho * z;
    let d2 = p.d_o * p.d_o;
    -d2 * l * hyp2f1_neg_b_m1(p.varpi, delta, x * l.powf(-p.alpha))
        + d2 * hyp2f1_neg_b_m1(p.varpi, delta, x)
}

/// `∫ ((1 + c(1+r/d_o)^{-α})^{-shape} − 1) r dr` over `u = ln(1 + r/d_o) ∈ [u0, u1]`.
fn radial_segment(c: f64, shape: f64, u0: f64, u1: f64, p: &AnalyticParams, tol: f64) -> Result<f64> {
    let d2 = p.d_o * p.d_o;
    let alpha = p.alpha;
    let f = |u: f64| {
        let x = c * (-alpha * u).exp();
        d2 * u.exp_m1() * u.exp() * (-shape * x.ln_1p()).exp_m1()
    };
    gauss_kronrod(f, u0, u1, tol, f64::MIN_POSITIVE, RADIAL_MAX_INTERVALS).map(|r| r.value)
}

/// `∫_l^∞ ((1 + ρzΓ(1+r/d_o)^{-α})^{-ηM} − 1) r dr` (≤ 0).
///
/// Integrated adaptively up to `max(tail_split·l, r*)`, where `r*` is the
/// radius beyond which the integrand is linear in `ρzΓβ` to 1e-9; the rest
/// is the closed form of the linearized integrand.
pub fn interference_radial_integral(l: f64, z: f64, p: &AnalyticParams, spec: &QuadratureSpec) -> Result<f64> {
    let c = p.rho * z * p.gap;
    if c == 0.0 {
        return Ok(0.0);
    }
    let shape = p.beams_per_bs();
    let u_l = (l / p.d_o).ln_1p();
    let u_split = (spec.tail_split * l / p.d_o)
        .ln_1p()
        .max((c / LINEAR_TAIL).ln() / p.alpha)
        .max(u_l);
    let body = radial_segment(c, shape, u_l, u_split, p, spec.radial_rel_tol)?;
    let big_u = u_split.exp();
    let a = p.alpha;
    let tail = -shape * c * p.d_o * p.d_o * (big_u.powf(2.0 - a) / (a - 2.0) - big_u.powf(1.0 - a) / (a - 1.0));
    Ok(body + tail)
}

/// `∫_0^l ((1 + ρz(1+r/d_o)^{-α})^{-ϖ} − 1) r dr` (≤ 0).
pub fn signal_radial_integral(l: f64, z: f64, p: &AnalyticParams, spec: &QuadratureSpec) -> Result<f64> {
    let c = p.rho * z;
    if c == 0.0 || l == 0.0 {
        return Ok(0.0);
    }
    radial_segment(c, p.varpi, 0.0, (l / p.d_o).ln_1p(), p, spec.radial_rel_tol)
}

/// Boundary distances on the periodic trapezoid grid over θ for one user distance.
pub(crate) struct AngularGrid {
    weight: f64,
    l: Vec<f64>,
    big_l: Vec<f64>,
}

impl AngularGrid {
    pub(crate) fn new(d: f64, p: &AnalyticParams, nodes: usize) -> Self {
        let h = 2.0 * PI / nodes as f64;
        let l: Vec<f64> = (0..nodes)
            .map(|k| boundary_distance_unchecked(d, h * (k as f64 + 0.5), p.cluster_radius))
            .collect();
        let big_l = l.iter().map(|&l| 1.0 + l / p.d_o).collect();
        Self { weight: h, l, big_l }
    }

    /// `λ ∫ (Ψ_I − Ψ_II) dθ` — the negated log of the interference MGF.
    pub(crate) fn interference_exponent(
        &self,
        z: f64,
        p: &AnalyticParams,
        spec: &QuadratureSpec,
        path: KernelPath,
    ) -> Result<f64> {
        let sum = match path {
            KernelPath::Hypergeometric => {
                let a = p.beams_per_bs();
                let (d1, d2) = (1.0 / p.alpha, 2.0 / p.alpha);
                let c = p.rho * z * p.gap;
                self.big_l
                    .iter()
                    .map(|&big_l| {
                        let x = c * big_l.powf(-p.alpha);
                        big_l * (big_l / 2.0 * hyp2f1_neg_b_m1(a, d2, x) - hyp2f1_neg_b_m1(a, d1, x))
                    })
                    .sum::<f64>()
                    * p.d_o
                    * p.d_o
            }
            KernelPath::RadialQuadrature => {
                let mut s = 0.0;
                for &l in &self.l {
                    s -= interference_radial_integral(l, z, p, spec)?;
                }
                s
            }
        };
        Ok(p.lambda * self.weight * sum)
    }

    /// `λ ∫ (Υ_I − Υ_II) dθ` — the negated log of the signal MGF.
    pub(crate) fn signal_exponent(
        &self,
        z: f64,
        p: &AnalyticParams,
        spec: &QuadratureSpec,
        path: KernelPath,
    ) -> Result<f64> {
        let sum = match path {
            KernelPath::Hypergeometric => {
                let a = p.varpi;
                let (d1, d2) = (1.0 / p.alpha, 2.0 / p.alpha);
                let x = p.rho * z;
                let at_origin = -0.5 * hyp2f1_neg_b_m1(a, d2, x) + hyp2f1_neg_b_m1(a, d1, x);
                self.big_l
                    .iter()
                    .map(|&big_l| {
                        let xs = x * big_l.powf(-p.alpha);
                        big_l * (-big_l / 2.0 * hyp2f1_neg_b_m1(a, d2, xs) + hyp2f1_neg_b_m1(a, d1, xs))
                            - at_origin
                    })
                    .sum::<f64>()
                    * p.d_o
                    * p.d_o
            }
            KernelPath::RadialQuadrature => {
                let mut s = 0.0;
                for &l in &self.l {
                    s -= signal_radial_integral(l, z, p, spec)?;
                }
                s
            }
        };
        Ok(p.lambda * self.weight * sum)
    }
}

fn check_distance(d: f64, p: &AnalyticParams) -> Result<()> {
    boundary_distance(d, 0.0, p.cluster_radius).map(|_| ())
}

fn check_z(z: f64) -> Result<()> {
    if z >= 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::param("z", format!("must be non-negative and finite, got {z}")))
    }
}

/// `λ ∫₀^{2π} (Ψ_I − Ψ_II) dθ` for a user at distance `d`; `M_I(z) = exp(−·)`.
pub fn interference_mgf_exponent(
    d: f64,
    z: f64,
    p: &AnalyticParams,
    spec: &QuadratureSpec,
    path: KernelPath,
) -> Result<f64> {
    check_distance(d, p)?;
    check_z(z)?;
    AngularGrid::new(d, p, spec.theta_nodes).interference_exponent(z, p, spec, path)
}

/// `λ ∫₀^{2π} (Υ_I − Υ_II) dθ` for a user at distance `d`; `M_S(z) = exp(−·)`.
pub fn signal_mgf_exponent(
    d: f64,
    z: f64,
    p: &AnalyticParams,
    spec: &QuadratureSpec,
    path: KernelPath,
) -> Result<f64> {
    check_distance(d, p)?;
    check_z(z)?;
    AngularGrid::new(d, p, spec.theta_nodes).signal_exponent(z, p, spec, path)
}

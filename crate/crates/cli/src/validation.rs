//! Acceptance checks, shared by the `validate` experiment and the
//! `acceptance` test target.

use std::f64::consts::PI;
use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netmimo::analytic::{
    asymptotic_upper_bound, eta_grid, expected_channel_strength_bound, finite_rc_signal_bound, isolated_cell_rate,
    log1p_via_laplace, optimal_loading_factor, per_bs_ergodic_sum_rate, psi_i, psi_ii, upsilon_i, upsilon_ii,
    AnalyticParams, QuadratureSpec,
};
use netmimo::beamforming::zf_beams;
use netmimo::channel::channel_from_pathloss;
use netmimo::config::SystemConfig;
use netmimo::gamma_matching::{intended_channel_params, moment_match, GammaParams};
use netmimo::geometry::{boundary_distance, scheduled_users};
use netmimo::montecarlo::{
    self, center_channel_strength, center_signal_power, collect_power_samples, EmptyCenter, PowerLayout, Scenario,
    SimPlan,
};
use netmimo::quadrature::gauss_kronrod;

use crate::experiments::{run_experiment, run_with_workers, ExperimentName, Method, RunRequest};
use crate::output::write_outputs;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    /// The headline number behind the verdict.
    pub metric: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationSettings {
    pub seed: u64,
    pub topologies: usize,
    pub fading: usize,
    pub quad: QuadratureSpec,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            seed: 1,
            topologies: 200,
            fading: 20,
            quad: QuadratureSpec::default(),
        }
    }
}

impl ValidationSettings {
    fn plan(&self, eta: f64, avg_cluster_size: f64) -> SimPlan {
        SimPlan {
            n_topologies: self.topologies,
            n_fading: self.fading,
            seed: self.seed,
            ..SimPlan::new(eta, avg_cluster_size)
        }
    }
}

type Outcome = Result<(bool, f64, String), String>;

fn check(criterion: u8, name: &'static str, outcome: Outcome) -> Check {
    match outcome {
        Ok((passed, metric, detail)) => Check {
            criterion,
            name,
            passed,
            metric,
            detail,
        },
        Err(e) => Check {
            criterion,
            name,
            passed: false,
            metric: f64::NAN,
            detail: format!("error: {e}"),
        },
    }
}

fn rate(config: &SystemConfig, eta: f64, b: f64, quad: &QuadratureSpec) -> Result<f64, String> {
    AnalyticParams::from_config(config, eta, b)
        .and_then(|p| per_bs_ergodic_sum_rate(&p, quad))
        .map(|r| r.value)
        .map_err(|e| e.to_string())
}

/// The loading factor maximizing the analytic rate lies in [0.55, 0.65]
/// for cluster sizes 4 and 6 on a 0.05 grid.
pub fn optimal_loading(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let run = || -> Outcome {
        let grid = eta_grid(0.05, 1.0, 0.05).map_err(|e| e.to_string())?;
        let mut ok = true;
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for b in [4.0, 6.0] {
            let curve = optimal_loading_factor(config, b, &grid, &s.quad).map_err(|e| e.to_string())?;
            ok &= (0.55 - 1e-9..=0.65 + 1e-9).contains(&curve.best_eta);
            worst = worst.max((curve.best_eta - 0.6).abs());
            detail.push(format!("B̄={b}: η*={} ({:.4})", curve.best_eta, curve.best_rate));
        }
        Ok((ok, worst, detail.join(", ")))
    };
    check(1, "optimal loading factor", run())
}

/// At full loading the rate falls with cluster size and the asymptotic bound is exactly zero.
pub fn full_loading_collapse(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let run = || -> Outcome {
        let sizes = [2.0, 4.0, 6.0, 8.0];
        let rates = sizes
            .iter()
            .map(|&b| rate(config, 1.0, b, &s.quad))
            .collect::<Result<Vec<_>, _>>()?;
        let decreasing = rates.windows(2).all(|w| w[1] < w[0]);
        let bound = AnalyticParams::from_config(config, 1.0, 4.0)
            .map(|p| asymptotic_upper_bound(&p))
            .map_err(|e| e.to_string())?;
        let detail = format!(
            "rates {} at B̄ = 2,4,6,8; bound at η=1 = {bound}",
            rates.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(" > ")
        );
        Ok((decreasing && bound == 0.0, rates[3] / rates[0], detail))
    };
    check(2, "full-loading collapse", run())
}

/// Simulated and analytic rates agree within max(5%, 2×CI). Empty measured
/// clusters count as zero rate, matching the unconditional analytic average.
pub fn simulation_agreement(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let run = || -> Outcome {
        let mut ok = true;
        let mut worst: f64 = 0.0;
        let mut detail = Vec::new();
        for (eta, b) in [(0.4, 2.0), (0.6, 2.0), (0.4, 4.0), (0.6, 4.0)] {
            let a = rate(config, eta, b, &s.quad)?;
            let plan = SimPlan {
                empty_center: EmptyCenter::CountZero,
                ..s.plan(eta, b)
            };
            let mc = montecarlo::run(&plan, config).map_err(|e| e.to_string())?;
            let gap = (mc.per_bs_rate - a).abs();
            let allowed = (0.05 * a).max(2.0 * mc.ci95);
            ok &= gap <= allowed;
            worst = worst.max(gap / allowed);
            detail.push(format!(
                "(η={eta}, B̄={b}) analytic {a:.4} vs {:.4}±{:.4}",
                mc.per_bs_rate, mc.ci95
            ));
        }
        Ok((ok, worst, detail.join("; ")))
    };
    check(3, "analytic vs simulation", run())
}

/// Clusters of ten BSs beat single-cell processing by at least 1.55×.
pub fn cluster_gain(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let run = || -> Outcome {
        let clustered = montecarlo::run(&s.plan(0.6, 10.0), config).map_err(|e| e.to_string())?;
        let single_plan = SimPlan {
            scenario: Scenario::SingleCellProcessing,
            ..s.plan(0.6, 10.0)
        };
        let single = montecarlo::run(&single_plan, config).map_err(|e| e.to_string())?;
        let ratio = clustered.per_bs_rate / single.per_bs_rate;
        let detail = format!(
            "clustered {:.4}±{:.4}, single-cell {:.4}±{:.4}, ratio {ratio:.3}",
            clustered.per_bs_rate, clustered.ci95, single.per_bs_rate, single.ci95
        );
        Ok((ratio >= 1.55, ratio, detail))
    };
    check(4, "cluster-size gain", run())
}

/// 2000-BS clusters reach 70–85% of an isolated cell.
pub fn saturation(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let run = || -> Outcome {
        let big = rate(config, 0.6, 2000.0, &s.quad)?;
        let cell = AnalyticParams::from_config(config, 0.6, 1.0)
            .and_then(|p| isolated_cell_rate(&p, &s.quad))
            .map_err(|e| e.to_string())?
            .value;
        let ratio = big / cell;
        let detail = format!("B̄=2000 {big:.4}, isolated cell {cell:.4}, ratio {ratio:.3}");
        Ok(((0.70..=0.85).contains(&ratio), ratio, detail))
    };
    check(5, "saturation", run())
}

/// Result of one property: passed, description.
type Property = Result<(bool, String), String>;

fn lemma_moments(rng: &mut ChaCha8Rng) -> Property {
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(1..=12);
        let parts: Vec<GammaParams> = (0..n)
            .map(|_| {
                let shape = rng.random_range(0.2..30.0);
                let scale = 10f64.powf(rng.random_range(-13.0..-5.0));
                GammaParams::new(shape, scale)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let fit = moment_match(&parts).map_err(|e| e.to_string())?;
        let mean: f64 = parts.iter().map(|g| g.shape * g.scale).sum();
        let var: f64 = parts.iter().map(|g| g.shape * g.scale * g.scale).sum();
        worst = worst
            .max((fit.mean() - mean).abs() / mean)
            .max((fit.variance() - var).abs() / var);
    }
    Ok((worst <= 1e-13, format!("moment mismatch ≤ {worst:.1e}")))
}

fn shape_ceiling(rng: &mut ChaCha8Rng, m: usize) -> Property {
    let mut ok = true;
    for _ in 0..500 {
        let b = rng.random_range(1..=20);
        let cap = (m * b) as f64;
        let equal = vec![10f64.powf(rng.random_range(-12.0..-6.0)); b];
        let k_eq = intended_channel_params(&equal, m).map_err(|e| e.to_string())?.shape;
        ok &= (k_eq - cap).abs() <= 1e-12 * cap;
        if b > 1 {
            let mut unequal: Vec<f64> = (0..b).map(|_| 10f64.powf(rng.random_range(-12.0..-6.0))).collect();
            unequal[0] *= 1.5;
            let k = intended_channel_params(&unequal, m).map_err(|e| e.to_string())?.shape;
            ok &= k < cap * (1.0 - 1e-12);
        }
    }
    Ok((ok, "k = MB for equal path losses, k < MB otherwise".into()))
}

fn zf_orthogonality(rng: &mut ChaCha8Rng, m: usize) -> Property {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let b = rng.random_range(1..=6);
        let eta = rng.random_range(0.1..=1.0);
        let k = scheduled_users(eta, m, b, true);
        let chans: Vec<_> = (0..k)
            .map(|_| {
                let pl: Vec<f64> = (0..b).map(|_| 10f64.powf(rng.random_range(-2.0..0.0))).collect();
                channel_from_pathloss(&pl, m, rng).coeffs
            })
            .collect();
        let beams = zf_beams(&chans, 1.0).map_err(|e| e.to_string())?;
        for (i, g) in chans.iter().enumerate() {
            for j in (0..k).filter(|&j| j != i) {
                let w = beams.beam(j);
                worst = worst.max(g.dotc(&w).norm() / (g.norm() * w.norm()));
            }
        }
    }
    Ok((worst < 1e-12, format!("max relative leakage {worst:.1e}")))
}

fn isotropic_power(m: usize, seed: u64) -> Property {
    let mut ok = true;
    let mut detail = Vec::new();
    for (b, eta) in [(1usize, 0.2), (2, 0.6), (4, 0.4)] {
        let layout = PowerLayout {
            serving_pathloss: vec![1e-9; b],
            interferer_pathloss: vec![3e-10; b],
            antennas: m,
            eta,
        };
        let s = collect_power_samples(&layout, 4000, seed).map_err(|e| e.to_string())?;
        let shape = (m * b) as f64 * (1.0 - eta) + 1.0;
        ok &= (s.signal_fit.shape - shape).abs() < 1e-9 && s.signal_ks.1 > 0.01 && s.interference_ks.1 > 0.01;
        detail.push(format!(
            "B={b},η={eta}: p={:.3}/{:.3}",
            s.signal_ks.1, s.interference_ks.1
        ));
    }
    Ok((ok, format!("KS {}", detail.join(", "))))
}

/// `∫ ((1 + c u^{-α})^{-a} − 1) u^k du` over `[lo, hi]`, or `[lo, ∞)` when
/// `hi` is `None`, integrated in `ln u` with a linearized far tail.
fn radial_oracle(a: f64, c: f64, alpha: f64, k: i32, lo: f64, hi: Option<f64>) -> Result<f64, String> {
    let f = |s: f64| {
        let u = s.exp();
        (-a * (c * u.powf(-alpha)).ln_1p()).exp_m1() * u.powi(k + 1)
    };
    let (top, tail) = match hi {
        Some(hi) => (hi, 0.0),
        None => {
            let top = lo.max((c / 1e-13).powf(1.0 / alpha));
            let e = f64::from(k + 1) - alpha;
            (top, a * c * top.powf(e) / e)
        }
    };
    let body = gauss_kronrod(f, lo.ln(), top.ln(), 1e-11, 0.0, 2000).map_err(|e| e.to_string())?;
    Ok(body.value + tail)
}

fn kernel_oracle(rng: &mut ChaCha8Rng, config: &SystemConfig) -> Property {
    let mut worst: f64 = 0.0;
    for _ in 0..60 {
        let eta = rng.random_range(0.1..=1.0);
        let b = rng.random_range(1.0..20.0);
        let p = AnalyticParams::from_config(config, eta, b).map_err(|e| e.to_string())?;
        let d = p.cluster_radius * rng.random::<f64>();
        let theta = rng.random_range(0.0..2.0 * PI);
        let z = 10f64.powf(rng.random_range(-16.0..0.0));
        let big_l = 1.0 + boundary_distance(d, theta, p.cluster_radius).map_err(|e| e.to_string())? / p.d_o;
        let d2 = p.d_o * p.d_o;
        let ci = p.rho * z * p.gap;
        let cs = p.rho * z;
        let a = p.beams_per_bs();
        let pairs = [
            (psi_i(d, theta, z, &p), -d2 * radial_oracle(a, ci, p.alpha, 1, big_l, None)?),
            (psi_ii(d, theta, z, &p), -d2 * radial_oracle(a, ci, p.alpha, 0, big_l, None)?),
            (upsilon_i(d, theta, z, &p), -d2 * radial_oracle(p.varpi, cs, p.alpha, 1, 1.0, Some(big_l))?),
            (upsilon_ii(d, theta, z, &p), -d2 * radial_oracle(p.varpi, cs, p.alpha, 0, 1.0, Some(big_l))?),
        ];
        for (closed, oracle) in pairs {
            if oracle != 0.0 || closed != 0.0 {
                worst = worst.max((closed - oracle).abs() / oracle.abs().max(closed.abs()));
            }
        }
    }
    Ok((worst <= 1e-6, format!("kernel relative error ≤ {worst:.1e}")))
}

fn log_identity() -> Property {
    let spec = QuadratureSpec::default().with_tolerance(1e-11);
    let mut worst: f64 = 0.0;
    for x in [1e-4, 0.01, 0.5, 1.0, 7.0, 100.0, 1e4, 1e8] {
        let v = log1p_via_laplace(x, &spec).map_err(|e| e.to_string())?;
        worst = worst.max((v - x.ln_1p()).abs() / x.ln_1p());
    }
    Ok((worst <= 1e-8, format!("ln(1+x) relative error ≤ {worst:.1e}")))
}

fn bound_dominance(config: &SystemConfig, s: &ValidationSettings) -> Property {
    let mut ok = true;
    let mut detail = Vec::new();
    for b in [2.0, 4.0, 10.0] {
        let plan = s.plan(0.6, b);
        let p = AnalyticParams::from_config(config, 0.6, b).map_err(|e| e.to_string())?;
        let strength = center_channel_strength(&plan, config).map_err(|e| e.to_string())?;
        let bound = expected_channel_strength_bound(&p);
        ok &= strength.mean <= bound;
        detail.push(format!("E‖g‖² B̄={b}: {:.3}", strength.mean / bound));
        if b <= 4.0 {
            let signal = center_signal_power(&plan, config).map_err(|e| e.to_string())?;
            let bound = finite_rc_signal_bound(&p);
            ok &= signal.mean <= bound;
            detail.push(format!("E|gᴴw|² B̄={b}: {:.3}", signal.mean / bound));
        }
    }
    Ok((ok, format!("mean/bound {}", detail.join(", "))))
}

/// The property suites: moment matching, shape ceiling, ZF orthogonality,
/// isotropic power laws, kernel oracle, log identity and bound dominance.
pub fn property_suites(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let m = config.antennas;
    let results: Vec<(&str, Property)> = vec![
        ("moment matching", lemma_moments(&mut rng)),
        ("shape ceiling", shape_ceiling(&mut rng, m)),
        ("zf orthogonality", zf_orthogonality(&mut rng, m)),
        ("isotropic power", isotropic_power(m, s.seed)),
        ("kernel oracle", kernel_oracle(&mut rng, config)),
        ("log identity", log_identity()),
        ("bound dominance", bound_dominance(config, s)),
    ];
    let total = results.len();
    let mut passed = 0;
    let mut detail = Vec::new();
    for (name, r) in results {
        match r {
            Ok((true, d)) => {
                passed += 1;
                detail.push(format!("{name} ok ({d})"));
            }
            Ok((false, d)) => detail.push(format!("{name} FAILED ({d})")),
            Err(e) => detail.push(format!("{name} FAILED (error: {e})")),
        }
    }
    check(
        6,
        "property suites",
        Ok((passed == total, passed as f64 / total as f64, detail.join("; "))),
    )
}

/// The same request run on 1, 4 and 16 workers writes identical CSV bytes.
pub fn reproducibility(config: &SystemConfig, s: &ValidationSettings) -> Check {
    let run = || -> Outcome {
        let req = RunRequest {
            method: Method::Both,
            seed: s.seed,
            topologies: 12,
            fading: 3,
            eta: Some(vec![0.6]),
            cluster_sizes: Some(vec![2.0, 3.0]),
            config: *config,
            quad_tol: s.quad.rate_rel_tol,
            ..RunRequest::new(ExperimentName::Fig4ClusterScaling)
        };
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut listings = Vec::new();
        for workers in [1, 4, 16] {
            let out = run_with_workers(Some(workers), || run_experiment(&req))
                .and_then(|r| r)
                .map_err(|e| e.to_string())?;
            let sub = dir.path().join(format!("w{workers}"));
            let manifest = write_outputs(&out, &req, &sub).map_err(|e| e.to_string())?;
            let files = manifest
                .curves
                .iter()
                .map(|c| fs::read(sub.join(&c.file)).map(|bytes| (c.file.clone(), bytes)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            listings.push(files);
        }
        let identical = listings.windows(2).all(|w| w[0] == w[1]);
        let n = listings[0].len();
        Ok((identical, n as f64, format!("{n} CSVs compared across 1, 4, 16 workers")))
    };
    check(7, "reproducibility", run())
}

/// Every criterion, in order. Failures never abort the remaining checks.
pub fn run_all(config: &SystemConfig, s: &ValidationSettings) -> Vec<Check> {
    vec![
        optimal_loading(config, s),
        full_loading_collapse(config, s),
        simulation_agreement(config, s),
        cluster_gain(config, s),
        saturation(config, s),
        property_suites(config, s),
        reproducibility(config, s),
    ]
}

use netmimo::analytic::{
    asymptotic_upper_bound, ergodic_rate_at_distance, interference_mgf_exponent, isolated_cell_rate, log1p_via_laplace,
    per_bs_ergodic_sum_rate, psi_i, psi_ii, signal_mgf_exponent, upsilon_i, upsilon_ii, AnalyticParams, KernelPath,
    QuadratureSpec,
};
use netmimo::config::SystemConfig;
use netmimo::geometry::boundary_distance;
use netmimo::quadrature::composite_nodes;
use proptest::prelude::*;

fn params(eta: f64, b: f64) -> AnalyticParams {
    AnalyticParams::from_config(&SystemConfig::default(), eta, b).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `∫ ((1 + c u^{-α})^{-a} − 1) u^k du` on `[lo, hi]` (or `[lo, ∞)`) with a
/// fixed composite Gauss–Legendre rule in `ln u` and a linearized far tail.
fn oracle(a: f64, c: f64, alpha: f64, k: i32, lo: f64, hi: Option<f64>) -> f64 {
    let (top, tail) = match hi {
        Some(hi) => (hi, 0.0),
        None => {
            let top = lo.max((c / 1e-14).powf(1.0 / alpha));
            let e = f64::from(k + 1) - alpha;
            (top, a * c * top.powf(e) / e)
        }
    };
    let body: f64 = composite_nodes(lo.ln(), top.ln(), 400, 20)
        .into_iter()
        .map(|(s, w)| {
            let u = s.exp();
            w * (-a * (c * u.powf(-alpha)).ln_1p()).exp_m1() * u.powi(k + 1)
        })
        .sum();
    body + tail
}

/// Table I rates computed independently with tight quadrature.
#[test]
fn reference_rates() {
    let spec = QuadratureSpec::default();
    for (eta, b, expected) in [
        (0.6, 4.0, 5.885115),
        (0.65, 4.0, 5.890681),
        (1.0, 2.0, 2.938289),
        (1.0, 8.0, 1.700374),
        (0.6, 1.0, 4.153545),
        (0.6, 10.0, 7.478392),
        (0.6, 2000.0, 17.836082),
    ] {
        let r = per_bs_ergodic_sum_rate(&params(eta, b), &spec).unwrap();
        assert!(rel(r.value, expected) < 3e-4, "η={eta} B̄={b}: {} vs {expected}", r.value);
    }
    let isolated = per_bs_ergodic_sum_rate(&params(0.6, 2000.0).isolated(), &spec).unwrap();
    assert!(rel(isolated.value, 20.24811) < 3e-4, "{}", isolated.value);
    let cell = isolated_cell_rate(&params(0.6, 1.0), &spec).unwrap();
    assert!(rel(cell.value, 22.58071) < 3e-4, "{}", cell.value);
}

#[test]
fn asymptotic_bound_dominates_large_clusters() {
    let spec = QuadratureSpec::default();
    for b in [64.0, 256.0] {
        for eta in [0.3, 0.6, 0.9] {
            let p = params(eta, b);
            let r = per_bs_ergodic_sum_rate(&p, &spec).unwrap().value;
            assert!(asymptotic_upper_bound(&p) >= r, "η={eta} B̄={b}");
        }
    }
}

#[test]
fn rate_falls_toward_the_cluster_edge() {
    let spec = QuadratureSpec::default();
    let p = params(0.6, 4.0);
    let rates: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| ergodic_rate_at_distance(f * p.cluster_radius, &p, &spec).unwrap())
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
}

#[test]
fn hypergeometric_and_quadrature_exponents_agree() {
    let spec = QuadratureSpec::default();
    for (eta, b) in [(0.2, 1.0), (0.6, 4.0), (1.0, 12.0)] {
        let p = params(eta, b);
        for d in [0.0, 0.4 * p.cluster_radius, p.cluster_radius] {
            for z in [1e-12, 1e-9, 1e-6, 1e-2] {
                let h = interference_mgf_exponent(d, z, &p, &spec, KernelPath::Hypergeometric).unwrap();
                let q = interference_mgf_exponent(d, z, &p, &spec, KernelPath::RadialQuadrature).unwrap();
                assert!(rel(h, q) < 1e-5, "interference d={d} z={z}: {h} vs {q}");
                let h = signal_mgf_exponent(d, z, &p, &spec, KernelPath::Hypergeometric).unwrap();
                let q = signal_mgf_exponent(d, z, &p, &spec, KernelPath::RadialQuadrature).unwrap();
                assert!(rel(h, q) < 1e-5, "signal d={d} z={z}: {h} vs {q}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernels_match_direct_quadrature(
        eta in 0.05f64..=1.0,
        b in 1.0f64..40.0,
        frac in 0.0f64..=1.0,
        theta in 0.0f64..std::f64::consts::TAU,
        log_z in -16.0f64..1.0,
    ) {
        let p = params(eta, b);
        let d = frac * p.cluster_radius;
        let z = 10f64.powf(log_z);
        let big_l = 1.0 + boundary_distance(d, theta, p.cluster_radius).unwrap() / p.d_o;
        let d2 = p.d_o * p.d_o;
        let (ci, cs) = (p.rho * z * p.gap, p.rho * z);
        let a = p.beams_per_bs();
        let cases = [
            (psi_i(d, theta, z, &p), -d2 * oracle(a, ci, p.alpha, 1, big_l, None)),
            (psi_ii(d, theta, z, &p), -d2 * oracle(a, ci, p.alpha, 0, big_l, None)),
            (upsilon_i(d, theta, z, &p), -d2 * oracle(p.varpi, cs, p.alpha, 1, 1.0, Some(big_l))),
            (upsilon_ii(d, theta, z, &p), -d2 * oracle(p.varpi, cs, p.alpha, 0, 1.0, Some(big_l))),
        ];
        for (closed, direct) in cases {
            if closed != 0.0 || direct != 0.0 {
                prop_assert!((closed - direct).abs() <= 1e-6 * closed.abs().max(direct.abs()),
                    "{closed} vs {direct}");
            }
        }
    }

    #[test]
    fn log_identity_holds(log_x in -4.0f64..8.0) {
        let x = 10f64.powf(log_x);
        let v = log1p_via_laplace(x, &QuadratureSpec::default().with_tolerance(1e-11)).unwrap();
        prop_assert!(rel(v, x.ln_1p()) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn rate_rises_with_snr_and_falls_with_gap(
        eta in 0.2f64..0.9,
        b in 1.0f64..8.0,
        frac in 0.0f64..1.0,
        factor in 1.5f64..10.0,
    ) {
        let spec = QuadratureSpec::default().with_tolerance(1e-6);
        let p = params(eta, b);
        let d = frac * p.cluster_radius;
        let base = ergodic_rate_at_distance(d, &p, &spec).unwrap();
        let louder = AnalyticParams { rho: p.rho * factor, ..p };
        let wider_gap = AnalyticParams { gap: p.gap * factor, ..p };
        prop_assert!(ergodic_rate_at_distance(d, &louder, &spec).unwrap() > base);
        prop_assert!(ergodic_rate_at_distance(d, &wider_gap, &spec).unwrap() < base);
    }
}

//! Size of the error made by replacing each cluster's BS count with its mean
//! in the signal-power surrogate.

use netmimo::config::SystemConfig;
use netmimo::gamma_matching::{decomposed_signal_surrogate, per_bs_signal_surrogate, SignalMultiplier};
use netmimo::geometry::{build_hex_lattice, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mean `log2(1 + ρS)` for a user uniform in the center cluster under the
/// actual-count and mean-count surrogates, over non-empty clusters.
fn surrogate_rates(b_avg: f64, eta: f64, mode: SignalMultiplier) -> (f64, f64) {
    let config = SystemConfig::default();
    let pl = config.pathloss();
    let rho = config.rho(eta);
    let lattice = build_hex_lattice(b_avg, config.lambda, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut actual, mut averaged, mut n) = (0.0, 0.0, 0);
    for t in 0..20_000u64 {
        let topo = Topology::poisson_by_cell(lattice.clone(), config.lambda, |_| ChaCha8Rng::seed_from_u64(t)).unwrap();
        if topo.bs_points.is_empty() {
            continue;
        }
        let user = lattice.sample_in(0, &mut rng);
        let betas: Vec<f64> = topo.bs_points.iter().map(|b| pl.gain(user.dist(b))).collect();
        let s3 = per_bs_signal_surrogate(&betas, config.antennas, eta, &mut rng).unwrap();
        let s4 = decomposed_signal_surrogate(&betas, config.antennas, b_avg, eta, mode, &mut rng).unwrap();
        actual += (rho * s3).ln_1p();
        averaged += (rho * s4).ln_1p();
        n += 1;
    }
    let to_bits = std::f64::consts::LN_2 * n as f64;
    (actual / to_bits, averaged / to_bits)
}

#[test]
fn mean_cluster_size_replacement_is_a_small_correction() {
    for b in [2.0, 4.0, 8.0] {
        for mode in [SignalMultiplier::PerBs, SignalMultiplier::Shared] {
            let (actual, averaged) = surrogate_rates(b, 0.6, mode);
            let rel = (averaged - actual) / actual;
            assert!(rel.abs() < 0.03, "B̄={b} {mode:?}: {actual} vs {averaged}");
        }
    }
}

use nalgebra::DMatrix;
use netmimo::beamforming::{rzf_beams, zf_beams};
use netmimo::channel::channel_from_pathloss;
use netmimo::gamma_matching::{intended_channel_params, moment_match, GammaParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channels(seed: u64, antennas: usize, pathloss: &[Vec<f64>]) -> Vec<nalgebra::DVector<num_complex::Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pathloss
        .iter()
        .map(|pl| channel_from_pathloss(pl, antennas, &mut rng).coeffs)
        .collect()
}

fn user_pathloss(users: usize, bs: usize, seed: u64) -> Vec<Vec<f64>> {
    // deterministic spread over two decades per user
    (0..users)
        .map(|u| {
            (0..bs)
                .map(|b| 10f64.powf(-2.0 * (((u * 7 + b * 3) as u64 ^ seed) % 17) as f64 / 16.0))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn zf_beams_are_unit_orthogonal_and_match_the_pseudo_inverse(
        antennas in 1usize..7,
        bs in 1usize..5,
        load in 0.05f64..1.0,
        seed in any::<u64>(),
    ) {
        let dims = antennas * bs;
        let k = ((load * dims as f64).round() as usize).clamp(1, dims);
        let g = channels(seed, antennas, &user_pathloss(k, bs, seed));
        let beams = zf_beams(&g, 2.0).unwrap();
        prop_assert!((beams.total_power() - 2.0).abs() < 1e-12);
        let gm = DMatrix::from_columns(&g);
        let pinv = gm.clone().pseudo_inverse(1e-14).unwrap();
        for i in 0..k {
            let w = beams.beam(i);
            prop_assert!((w.norm() - 1.0).abs() < 1e-9);
            for (j, gj) in g.iter().enumerate() {
                if j != i {
                    prop_assert!(gj.dotc(&w).norm() / gj.norm() < 1e-12);
                }
            }
            // G (GᴴG)⁻¹ column i, as the conjugate row of the pseudo-inverse
            let reference = pinv.row(i).adjoint();
            let align = reference.dotc(&w).norm() / reference.norm();
            prop_assert!((1.0 - align).abs() < 1e-9, "alignment {align}");
        }
    }

    #[test]
    fn rzf_tends_to_zf(antennas in 2usize..6, seed in any::<u64>()) {
        let g = channels(seed, antennas, &user_pathloss(antennas - 1, 1, seed));
        let zf = zf_beams(&g, 1.0).unwrap();
        let rzf = rzf_beams(&g, 1e-12, 1.0).unwrap();
        for i in 0..g.len() {
            prop_assert!((1.0 - zf.beam(i).dotc(&rzf.beam(i)).norm()).abs() < 1e-6);
        }
    }

    #[test]
    fn matched_shape_never_exceeds_stacked_dimension(
        pl in prop::collection::vec(1e-12f64..1e-3, 1..24),
        antennas in 1usize..9,
    ) {
        let cap = (antennas * pl.len()) as f64;
        let k = intended_channel_params(&pl, antennas).unwrap().shape;
        prop_assert!(k <= cap * (1.0 + 1e-12));
        let equal = pl.iter().all(|&b| (b - pl[0]).abs() <= 1e-15 * pl[0]);
        if !equal {
            prop_assert!(k < cap);
        }
    }

    #[test]
    fn moment_matching_keeps_mean_and_variance(
        parts in prop::collection::vec((0.1f64..40.0, 1e-12f64..1e-4), 1..16),
    ) {
        let comps: Vec<GammaParams> = parts.iter().map(|&(k, t)| GammaParams::new(k, t).unwrap()).collect();
        let fit = moment_match(&comps).unwrap();
        let mean: f64 = comps.iter().map(|g| g.mean()).sum();
        let var: f64 = comps.iter().map(|g| g.variance()).sum();
        prop_assert!((fit.mean() - mean).abs() <= 1e-13 * mean);
        prop_assert!((fit.variance() - var).abs() <= 1e-13 * var);
    }
}

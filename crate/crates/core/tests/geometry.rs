use netmimo::geometry::{assign_to_cluster, build_hex_lattice, sample_ppp, HexLattice, Point2D, Rect, Topology};
use netmimo::stats::{chi_square_p_value, ks_test};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Discrete, Poisson};

const LAMBDA: f64 = 1.0 / (std::f64::consts::PI * 500.0 * 500.0);

#[test]
fn ppp_counts_are_poisson_and_positions_uniform() {
    let window = Rect::centered(4000.0, 3000.0);
    let mean = LAMBDA * window.area();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let runs = 4000;
    let mut counts = vec![0.0; 30];
    let mut xs = Vec::new();
    for _ in 0..runs {
        let pts = sample_ppp(LAMBDA, &window, &mut rng).unwrap();
        counts[pts.len().min(29)] += 1.0;
        xs.extend(pts.iter().map(|p| p.x));
        assert!(pts.iter().all(|p| window.contains(p)));
    }
    // pool the sparse tails into the end bins
    let pois = Poisson::new(mean).unwrap();
    let (lo, hi) = (6usize, 23usize);
    let mut obs = vec![counts[..=lo].iter().sum::<f64>()];
    let mut exp = vec![(0..=lo as u64).map(|k| pois.pmf(k)).sum::<f64>() * runs as f64];
    for k in lo + 1..hi {
        obs.push(counts[k]);
        exp.push(pois.pmf(k as u64) * runs as f64);
    }
    obs.push(counts[hi..].iter().sum());
    exp.push(runs as f64 - exp.iter().sum::<f64>());
    let p = chi_square_p_value(&obs, &exp, 0);
    assert!(p > 0.01, "count chi-square p = {p}");
    let (_, p) = ks_test(&xs, |x| ((x + 2000.0) / 4000.0).clamp(0.0, 1.0));
    assert!(p > 0.01, "position KS p = {p}");
}

#[test]
fn hexagons_receive_equal_shares_of_a_ppp() {
    let lattice = build_hex_lattice(4.0, LAMBDA, 2).unwrap();
    let window = lattice.simulation_window();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut per_hex = vec![0.0; lattice.len()];
    for _ in 0..300 {
        for p in sample_ppp(LAMBDA, &window, &mut rng).unwrap() {
            if let Ok(c) = assign_to_cluster(&lattice, p) {
                per_hex[c] += 1.0;
            }
        }
    }
    let total: f64 = per_hex.iter().sum();
    let expected = vec![total / lattice.len() as f64; lattice.len()];
    let p = chi_square_p_value(&per_hex, &expected, 0);
    assert!(p > 0.01, "hexagon share chi-square p = {p}");
    // and the covered area matches 19 cells
    let share = total / (300.0 * LAMBDA * window.area());
    assert!((share - 19.0 * lattice.cell_area / window.area()).abs() < 0.01);
}

#[test]
fn per_cell_poisson_counts_match_density() {
    let lattice = build_hex_lattice(4.0, LAMBDA, 1).unwrap();
    let mut counts = Vec::new();
    for t in 0..400u64 {
        let topo = Topology::poisson_by_cell(lattice.clone(), LAMBDA, |c| {
            ChaCha8Rng::seed_from_u64(t * 1000 + c as u64)
        })
        .unwrap();
        for (c, members) in topo.bs_by_cluster().iter().enumerate() {
            for &b in members {
                assert!(lattice.contains(c, &topo.bs_points[b]));
            }
            counts.push(members.len() as f64);
        }
    }
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!((mean - 4.0).abs() < 0.15, "mean {mean}");
    assert!((var / mean - 1.0).abs() < 0.1, "dispersion {}", var / mean);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samples_in_a_hexagon_are_assigned_to_it(
        area in 1e3f64..1e8,
        layers in 0usize..4,
        seed in any::<u64>(),
    ) {
        let lattice = HexLattice::with_area(area, layers).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for idx in 0..lattice.len() {
            let p = lattice.sample_in(idx, &mut rng);
            prop_assert_eq!(assign_to_cluster(&lattice, p).unwrap(), idx);
        }
    }

    #[test]
    fn points_beyond_the_tessellation_are_rejected(angle in 0.0f64..std::f64::consts::TAU, layers in 0usize..3) {
        let lattice = HexLattice::with_area(1e6, layers).unwrap();
        let far = (2 * layers + 3) as f64 * lattice.circumradius;
        prop_assert!(assign_to_cluster(&lattice, Point2D::polar(far, angle)).is_err());
    }
}

//! ZF and RZF beams over stacked cluster channels, and per-user SINR.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot size below which a channel set is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Unit-norm beams (one column per scheduled user) with equal power per beam.
#[derive(Debug, Clone)]
pub struct BeamSet {
    pub beams: DMatrix<Complex64>,
    pub per_beam_power: f64,
}

impl BeamSet {
    pub fn len(&self) -> usize {
        self.beams.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.ncols() == 0
    }

    pub fn total_power(&self) -> f64 {
        self.per_beam_power * self.len() as f64
    }

    pub fn beam(&self, i: usize) -> DVector<Complex64> {
        self.beams.column(i).into_owned()
    }

    /// `Σ_k |fᴴ w_k|²` (beam gains only, no power scaling).
    pub fn leakage(&self, f: &DVector<Complex64>) -> f64 {
        self.beams.ad_mul(f).norm_squared()
    }
}

fn stack(channels: &[DVector<Complex64>]) -> Result<DMatrix<Complex64>> {
    let first = channels
        .first()
        .ok_or_else(|| Error::param("channels", "need at least one user channel"))?;
    let dim = first.len();
    if channels.iter().any(|c| c.len() != dim) {
        return Err(Error::param("channels", "all channels must share one dimension"));
    }
    if channels.len() > dim {
        return Err(Error::param(
            "channels",
            format!("{} users exceed {} spatial dimensions", channels.len(), dim),
        ));
    }
    Ok(DMatrix::from_columns(channels))
}

fn normalize_columns(mut w: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    for mut col in w.column_iter_mut() {
        let n = col.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::DegenerateChannel("zero-norm beam".into()));
        }
        col.unscale_mut(n);
    }
    Ok(w)
}

/// Zero-forcing beams: beam i is user i's channel projected onto the null
/// space of the other users' channels, normalized to unit length.
///
/// Computed as the columns of `Q R^{-H}` from a thin QR of the channel
/// matrix, which spans the same directions as `G (GᴴG)^{-1}` without forming
/// the Gram matrix.
pub fn zf_beams(channels: &[DVector<Complex64>], total_power: f64) -> Result<BeamSet> {
    let g = stack(channels)?;
    let k = g.ncols();
    let qr = g.qr();
    let r = qr.r();
    let max_pivot = (0..k).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].norm() <= RANK_TOL * max_pivot) || max_pivot == 0.0 {
        return Err(Error::DegenerateChannel(
            "scheduled channels are linearly dependent".into(),
        ));
    }
    let q = qr.q();
    let x = r
        .solve_upper_triangular(&q.adjoint())
        .ok_or_else(|| Error::DegenerateChannel("singular triangular factor".into()))?;
    let beams = normalize_columns(x.adjoint())?;
    Ok(BeamSet {
        beams,
        per_beam_power: total_power / k as f64,
    })
}

/// Regularized ZF: beam i ∝ column i of `G (GᴴG + reg·I)^{-1}`, unit-normalized.
pub fn rzf_beams(channels: &[DVector<Complex64>], reg: f64, total_power: f64) -> Result<BeamSet> {
    if !(reg >= 0.0) {
        return Err(Error::param("reg", format!("must be non-negative, got {reg}")));
    }
    let g = stack(channels)?;
    let k = g.ncols();
    let mut gram = g.ad_mul(&g);
    for i in 0..k {
        gram[(i, i)] += Complex64::new(reg, 0.0);
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::DegenerateChannel("regularized Gram matrix not positive definite".into()))?;
    let x = chol.solve(&g.adjoint());
    let beams = normalize_columns(x.adjoint())?;
    Ok(BeamSet {
        beams,
        per_beam_power: total_power / k as f64,
    })
}

/// One user's received signal, interference and rate for a single fading slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    /// Signal power divided by the noise power.
    pub signal_power: f64,
    /// Inter-cluster interference power divided by the noise power.
    pub interference_power: f64,
    pub gamma: f64,
    /// bits/s/Hz
    pub rate: f64,
}

impl SinrSample {
    pub fn from_powers(signal_power: f64, interference_power: f64, gap: f64) -> Self {
        let gamma = signal_power / (interference_power + 1.0);
        Self {
            signal_power,
            interference_power,
            gamma,
            rate: (gamma / gap).ln_1p() / std::f64::consts::LN_2,
        }
    }
}

/// SINR of a user served by `own_beam` with `own_power`, interfered by the
/// beams of other clusters seen through the corresponding stacked channels.
pub fn sinr(
    user_channel: &DVector<Complex64>,
    own_beam: &DVector<Complex64>,
    own_power: f64,
    interferers: &[(&DVector<Complex64>, &BeamSet)],
    noise: f64,
    gap: f64,
) -> SinrSample {
    let signal = own_power * user_channel.dotc(own_beam).norm_sqr();
    let interference: f64 = interferers
        .iter()
        .map(|(f, beams)| beams.per_beam_power * beams.leakage(f))
        .sum();
    SinrSample::from_powers(signal / noise, interference / noise, gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_fading;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(v: DVector<Complex64>) -> DVector<Complex64> {
        let n = v.norm();
        v.unscale(n)
    }

    #[test]
    fn single_user_beam_is_the_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = unit(sample_fading(6, &mut rng));
        let set = zf_beams(std::slice::from_ref(&g), 2.0).unwrap();
        let w = set.beam(0);
        assert_relative_eq!(g.dotc(&w).norm(), 1.0, epsilon = 1e-12);
        assert_eq!(set.per_beam_power, 2.0);
    }

    #[test]
    fn orthogonal_channels_are_their_own_beams() {
        let mut e1 = DVector::zeros(4);
        let mut e2 = DVector::zeros(4);
        e1[0] = Complex64::new(1.0, 0.0);
        e2[2] = Complex64::new(0.0, 1.0);
        let set = zf_beams(&[e1.clone(), e2.clone()], 1.0).unwrap();
        assert_relative_eq!(e1.dotc(&set.beam(0)).norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(e2.dotc(&set.beam(1)).norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zf_nulls_intra_cluster_interference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let chans: Vec<_> = (0..7).map(|_| sample_fading(10, &mut rng)).collect();
            let set = zf_beams(&chans, 1.0).unwrap();
            for i in 0..7 {
                assert_relative_eq!(set.beam(i).norm(), 1.0, epsilon = 1e-12);
                for k in 0..7 {
                    if k != i {
                        let leak = chans[k].dotc(&set.beam(i)).norm_sqr() / chans[k].norm_squared();
                        assert!(leak < 1e-24, "leak {leak}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_dependent_or_oversized_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = sample_fading(3, &mut rng);
        let twice = g.scale(2.0);
        assert!(matches!(zf_beams(&[g.clone(), twice], 1.0), Err(Error::DegenerateChannel(_))));
        let many: Vec<_> = (0..4).map(|_| sample_fading(3, &mut rng)).collect();
        assert!(zf_beams(&many, 1.0).is_err());
        assert!(zf_beams(&[], 1.0).is_err());
    }

    #[test]
    fn rzf_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let chans: Vec<_> = (0..3).map(|_| sample_fading(8, &mut rng)).collect();
        let zf = zf_beams(&chans, 1.0).unwrap();
        let near_zf = rzf_beams(&chans, 1e-12, 1.0).unwrap();
        let exact_zf = rzf_beams(&chans, 0.0, 1.0).unwrap();
        let near_mf = rzf_beams(&chans, 1e9, 1.0).unwrap();
        for i in 0..3 {
            let angle = |a: &DVector<Complex64>, b: &DVector<Complex64>| {
                (a.dotc(b).norm() / (a.norm() * b.norm())).min(1.0).acos()
            };
            assert!(angle(&zf.beam(i), &near_zf.beam(i)) < 1e-4);
            assert!(angle(&zf.beam(i), &exact_zf.beam(i)) < 1e-6);
            assert!(angle(&chans[i], &near_mf.beam(i)) < 1e-4);
        }
    }

    #[test]
    fn power_accounting() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let chans: Vec<_> = (0..6).map(|_| sample_fading(15, &mut rng)).collect();
        let total = 3.0 * 19.95;
        let set = zf_beams(&chans, total).unwrap();
        assert_relative_eq!(set.total_power(), total, max_relative = 1e-12);
    }

    #[test]
    fn sinr_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = unit(sample_fading(5, &mut rng));
        let rho = 37.0;
        let s = sinr(&g, &g, rho * 0.01, &[], 0.01, 1.0);
        assert_relative_eq!(s.gamma, rho, max_relative = 1e-12);
        assert_relative_eq!(s.rate, (1.0 + rho).log2(), max_relative = 1e-12);

        let other = zf_beams(&[sample_fading(5, &mut rng)], 1e12).unwrap();
        let f = sample_fading(5, &mut rng);
        let s = sinr(&g, &g, 1.0, &[(&f, &other)], 1.0, 2.0);
        assert!(s.gamma < 1e-9);
        assert!(s.rate < 1e-9);
    }
}

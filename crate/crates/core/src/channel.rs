//! Bounded path loss, Rayleigh fading, and stacked multi-BS channel vectors.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::Point2D;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PathLossParams {
    /// Reference distance in meters.
    pub d_o: f64,
    pub alpha: f64,
}

impl PathLossParams {
    pub fn new(d_o: f64, alpha: f64) -> Result<Self> {
        if !(d_o > 0.0) {
            return Err(Error::param("d_o", format!("must be positive, got {d_o}")));
        }
        if !(alpha > 2.0) {
            return Err(Error::param("alpha", format!("α > 2 required, got {alpha}")));
        }
        Ok(Self { d_o, alpha })
    }

    #[inline]
    pub fn gain(&self, r: f64) -> f64 {
        (1.0 + r / self.d_o).powf(-self.alpha)
    }
}

/// `(1 + r/d_o)^{-α}`.
pub fn path_loss(r: f64, p: &PathLossParams) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::param("r", format!("distance must be non-negative, got {r}")));
    }
    Ok(p.gain(r))
}

#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// i.i.d. CN(0, 1) entries.
pub fn sample_fading<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| complex_normal(rng))
}

/// Stacked channel `[g_1; …; g_B]` from every BS of a cluster to one user.
#[derive(Debug, Clone)]
pub struct CompositeChannel {
    pub coeffs: DVector<Complex64>,
    pub per_bs_pathloss: Vec<f64>,
}

impl CompositeChannel {
    pub fn strength(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    pub fn antennas_per_bs(&self) -> usize {
        self.coeffs.len() / self.per_bs_pathloss.len().max(1)
    }
}

/// Block b is `sqrt(β_b) h_b` with fresh `h_b ~ CN(0, I_M)`.
pub fn composite_channel<R: Rng + ?Sized>(
    user: Point2D,
    bs_list: &[Point2D],
    antennas: usize,
    p: &PathLossParams,
    rng: &mut R,
) -> Result<CompositeChannel> {
    if bs_list.is_empty() {
        return Err(Error::param("bs_list", "must contain at least one BS"));
    }
    let per_bs_pathloss: Vec<f64> = bs_list.iter().map(|b| p.gain(user.dist(b))).collect();
    Ok(channel_from_pathloss(&per_bs_pathloss, antennas, rng))
}

/// Composite channel for known per-BS path losses.
pub fn channel_from_pathloss<R: Rng + ?Sized>(
    pathloss: &[f64],
    antennas: usize,
    rng: &mut R,
) -> CompositeChannel {
    let mut coeffs = DVector::zeros(antennas * pathloss.len());
    for (b, &beta) in pathloss.iter().enumerate() {
        let amp = beta.sqrt();
        for m in 0..antennas {
            coeffs[b * antennas + m] = complex_normal(rng) * amp;
        }
    }
    CompositeChannel {
        coeffs,
        per_bs_pathloss: pathloss.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_loss_examples() {
        let p = PathLossParams::new(0.392, 3.76).unwrap();
        assert_eq!(path_loss(0.0, &p).unwrap(), 1.0);
        assert_relative_eq!(path_loss(0.392, &p).unwrap(), 2f64.powf(-3.76), max_relative = 1e-14);
        // 40-digit mpmath reference
        assert_relative_eq!(
            path_loss(100.0, &p).unwrap(),
            8.797_655_916_025_946e-10,
            max_relative = 1e-12
        );
        assert!(path_loss(-1.0, &p).is_err());
    }

    #[test]
    fn path_loss_params_validate() {
        assert!(PathLossParams::new(0.392, 2.0).is_err());
        assert!(PathLossParams::new(0.0, 3.0).is_err());
    }

    #[test]
    fn fading_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = sample_fading(1_000_000, &mut rng);
        let n = h.len() as f64;
        let var = h.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        let mean = h.iter().sum::<Complex64>() / n;
        assert!((var - 1.0).abs() < 0.005, "variance {var}");
        // 3 sigma band for the sample mean of each component (variance 1/2 each)
        let band = 3.0 * (0.5 / n).sqrt();
        assert!(mean.re.abs() < band && mean.im.abs() < band, "mean {mean}");
    }

    #[test]
    fn single_unit_block_is_plain_fading() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = composite_channel(Point2D::ORIGIN, &[Point2D::ORIGIN], 4, &PathLossParams::new(1.0, 3.0).unwrap(), &mut rng)
            .unwrap();
        assert_eq!(g.per_bs_pathloss, vec![1.0]);
        assert_eq!(g.coeffs.len(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = sample_fading(4, &mut rng);
        assert_eq!(g.coeffs, h);
    }

    #[test]
    fn composite_requires_bs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PathLossParams::new(1.0, 3.0).unwrap();
        assert!(composite_channel(Point2D::ORIGIN, &[], 4, &p, &mut rng).is_err());
    }
}

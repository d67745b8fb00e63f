//! Sample summaries and goodness-of-fit helpers used by the simulator and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Mean and 95% confidence half-width of independent replicate means.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MeanCi {
    pub mean: f64,
    pub ci95: f64,
    pub n: usize,
}

pub fn mean_ci(samples: &[f64]) -> MeanCi {
    let n = samples.len();
    if n == 0 {
        return MeanCi {
            mean: f64::NAN,
            ci95: f64::NAN,
            n,
        };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return MeanCi { mean, ci95: 0.0, n };
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    MeanCi {
        mean,
        ci95: 1.959_963_984_540_054 * (var / n as f64).sqrt(),
        n,
    }
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n - F|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` for sample size `n`
/// (Stephens' small-sample correction of the Kolmogorov distribution).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let t = (sn + 0.12 + 0.11 / sn) * d;
    if t < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powi(j as i32 - 1) * (-2.0 * j * j * t * t).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> (f64, f64) {
    let d = ks_statistic(samples, cdf);
    (d, ks_p_value(d, samples.len()))
}

/// Pearson chi-square p-value for observed counts against expected counts.
pub fn chi_square_p_value(observed: &[f64], expected: &[f64], fitted_params: usize) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let dof = (observed.len() - 1 - fitted_params) as f64;
    1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat)
}

/// Empirical CDF as sorted `(value, F(value))` steps.
pub fn empirical_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for (i, x) in xs.into_iter().enumerate() {
        let f = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = f,
            _ => out.push((x, f)),
        }
    }
    out
}

pub fn median(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_ci_basic() {
        let m = mean_ci(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert_relative_eq!(m.ci95, 1.959_963_984_540_054 * (5.0f64 / 3.0 / 4.0).sqrt());
        assert_eq!(mean_ci(&[7.0]).ci95, 0.0);
    }

    #[test]
    fn ks_perfect_grid_has_small_statistic() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let (d, p) = ks_test(&xs, |x| x);
        assert_relative_eq!(d, 0.5 / n as f64, epsilon = 1e-12);
        assert!(p > 0.99);
    }

    #[test]
    fn ks_p_value_reference_points() {
        // Kolmogorov distribution: P(K > 1.3581) ≈ 0.05, P(K > 1.6276) ≈ 0.01
        let n = 1_000_000;
        let scale = (n as f64).sqrt() + 0.12 + 0.11 / (n as f64).sqrt();
        assert!((ks_p_value(1.3581 / scale, n) - 0.05).abs() < 5e-4);
        assert!((ks_p_value(1.6276 / scale, n) - 0.01).abs() < 2e-4);
    }

    #[test]
    fn ecdf_is_monotone_and_ends_at_one() {
        let c = empirical_cdf(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(c, vec![(1.0, 0.25), (2.0, 0.75), (3.0, 1.0)]);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }
}

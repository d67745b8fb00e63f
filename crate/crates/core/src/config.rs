//! Physical and network parameters, with the reference deployment as defaults.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::PathLossParams;
use crate::error::{Error, Result};

/// System parameters. Powers are given in dBm/dB and converted once by the
/// accessor methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// BS density per m².
    pub lambda: f64,
    /// Bandwidth in Hz.
    #[serde(rename = "W")]
    pub bandwidth: f64,
    /// Per-BS transmit power in dBm.
    #[serde(rename = "P_T")]
    pub tx_power_dbm: f64,
    /// Noise power spectral density in dBm/Hz.
    #[serde(rename = "N_o")]
    pub noise_density_dbm: f64,
    /// Receiver noise figure in dB.
    #[serde(rename = "N_f")]
    pub noise_figure_db: f64,
    /// SNR gap in dB.
    pub gap: f64,
    pub alpha: f64,
    /// Path-loss reference distance in meters.
    pub d_o: f64,
    /// Antennas per BS.
    #[serde(rename = "M")]
    pub antennas: usize,
    /// User density as a multiple of the BS density (user-rate CDFs).
    pub user_density_factor: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0 / (PI * 500.0 * 500.0),
            bandwidth: 20e6,
            tx_power_dbm: 43.0,
            noise_density_dbm: -174.0,
            noise_figure_db: 9.0,
            gap: 3.0,
            alpha: 3.76,
            d_o: 0.3920,
            antennas: 5,
            user_density_factor: 20.0,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| {
            Err(Error::Config {
                key: key.to_string(),
                reason,
            })
        };
        let finite = [
            ("lambda", self.lambda),
            ("W", self.bandwidth),
            ("P_T", self.tx_power_dbm),
            ("N_o", self.noise_density_dbm),
            ("N_f", self.noise_figure_db),
            ("gap", self.gap),
            ("alpha", self.alpha),
            ("d_o", self.d_o),
            ("user_density_factor", self.user_density_factor),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return bad(key, format!("must be finite, got {v}"));
            }
        }
        if self.lambda <= 0.0 {
            return bad("lambda", format!("BS density must be positive, got {}", self.lambda));
        }
        if self.bandwidth <= 0.0 {
            return bad("W", format!("bandwidth must be positive, got {}", self.bandwidth));
        }
        if self.gap < 0.0 {
            return bad("gap", format!("SNR gap must be ≥ 0 dB, got {}", self.gap));
        }
        if self.alpha <= 2.0 {
            return bad("alpha", format!("α > 2 required, got {}", self.alpha));
        }
        if self.d_o <= 0.0 {
            return bad("d_o", format!("reference distance must be positive, got {}", self.d_o));
        }
        if self.antennas == 0 {
            return bad("M", "at least one antenna per BS required".into());
        }
        if self.user_density_factor <= 0.0 {
            return bad(
                "user_density_factor",
                format!("must be positive, got {}", self.user_density_factor),
            );
        }
        Ok(())
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    /// Noise power `N_o + 10 log10(W) + N_f` in watts.
    pub fn noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_density_dbm + 10.0 * self.bandwidth.log10() + self.noise_figure_db)
    }

    pub fn gap_linear(&self) -> f64 {
        db_to_linear(self.gap)
    }

    /// Per-beam SNR `P_T / (η M σ²)`.
    pub fn rho(&self, eta: f64) -> f64 {
        self.tx_power_w() / (eta * self.antennas as f64 * self.noise_w())
    }

    pub fn pathloss(&self) -> PathLossParams {
        PathLossParams {
            d_o: self.d_o,
            alpha: self.alpha,
        }
    }

    /// Canonical `key = value` rendering; parses back to the same config.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// Stable 64-bit FNV-1a digest of the canonical rendering.
    pub fn digest(&self) -> String {
        format!("{:016x}", fnv1a(self.to_text().as_bytes()))
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Parse flat `key = value` text; missing keys take their default values.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let cfg: SystemConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let key = e
            .span()
            .map(|span| {
                let start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
                let end = text[span.start..].find('\n').map_or(text.len(), |i| span.start + i);
                let line = &text[start..end];
                line.split('=').next().unwrap_or(line).trim().to_string()
            })
            .unwrap_or_default();
        Error::Config { key, reason: msg }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        key: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, SystemConfig::default());
        assert_relative_eq!(cfg.lambda, 1.0 / (PI * 250_000.0));
        assert_eq!(cfg.antennas, 5);
        assert_eq!(cfg.alpha, 3.76);
        assert_eq!(cfg.d_o, 0.392);
    }

    #[test]
    fn power_conversions() {
        let cfg = SystemConfig::default();
        assert!((cfg.tx_power_w() - 19.953).abs() < 1e-3);
        // -174 + 73.01 + 9 = -91.99 dBm
        assert_relative_eq!(cfg.noise_w(), 6.324_555_320_336_758e-13, max_relative = 1e-12);
        assert_relative_eq!(cfg.gap_linear(), 1.995_262_314_968_879_5, max_relative = 1e-14);
        assert_relative_eq!(cfg.rho(0.6), 1.051_595_574_133_655_4e13, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_alpha_with_key() {
        let err = parse_config("alpha = 1.5").unwrap_err();
        match err {
            Error::Config { key, reason } => {
                assert_eq!(key, "alpha");
                assert!(reason.contains("α > 2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_and_malformed_keys() {
        assert!(matches!(parse_config("beta = 3"), Err(Error::Config { .. })));
        match parse_config("gap = 3.0\nM = \"five\"") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "M"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partial_override() {
        let cfg = parse_config("M = 8\nP_T = 46.0 # dBm\n").unwrap();
        assert_eq!(cfg.antennas, 8);
        assert_eq!(cfg.tx_power_dbm, 46.0);
        assert_eq!(cfg.gap, 3.0);
    }

    #[test]
    fn text_round_trip_and_digest() {
        let cfg = SystemConfig {
            antennas: 7,
            ..SystemConfig::default()
        };
        let back = parse_config(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.digest(), cfg.digest());
        assert_ne!(cfg.digest(), SystemConfig::default().digest());
    }
}

//! Run configuration.
//!
//! One flat `key = value` text file drives every suite.  The knobs fall into
//! three groups: the Hermite picture of the plane (`hermite_cutoff`,
//! `buffer`, `theta_samples`, `quad_radius`, `quad_points`), the Fock picture
//! of the quaternions (`fock_degree`, `quat_quad_points`, `a_magnitude`), and
//! bookkeeping (`tol`, `seed`).  Keys containing `_set` name grid set files
//! and are resolved relative to the directory of the config file, so a config
//! can travel with its sets.
//!
//! Serialisation is value exact: floats are written in shortest round trip
//! form, so parse(write(c)) == c bit for bit.

use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config key {0} is missing")]
    MissingKey(&'static str),
    #[error("config key {key} out of range: {msg}")]
    Invalid { key: &'static str, msg: String },
    #[error("could not read config: {0}")]
    Io(#[from] std::io::Error),
}

/// Truncation and quadrature parameters shared by every suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationConfig {
    /// Number of Hermite modes kept in the plane picture.
    pub hermite_cutoff: usize,
    /// Modes above `hermite_cutoff - 1 - buffer` are treated as untrusted
    /// headroom: test functions avoid them, internal sums still use them.
    pub buffer: usize,
    /// Uniform samples of the circle; exact for trig polynomials of degree
    /// below half this count.
    pub theta_samples: usize,
    /// Half side of the square quadrature box in the plane.
    pub quad_radius: f64,
    /// Midpoint nodes per axis in the plane box.
    pub quad_points: usize,
    /// Holomorphic monomials per complex variable in the Fock picture.
    pub fock_degree: usize,
    /// Gauss-Hermite nodes per real axis for quaternion integrals.
    pub quat_quad_points: usize,
    /// Modulus of the central character parameter for the quaternion group.
    pub a_magnitude: f64,
    /// Base tolerance the suites scale their acceptance thresholds from.
    pub tol: f64,
    /// Seed for every randomised choice (test functions, start vectors).
    pub seed: u64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            hermite_cutoff: 32,
            buffer: 28,
            theta_samples: 64,
            quad_radius: 8.0,
            quad_points: 200,
            fock_degree: 6,
            quat_quad_points: 12,
            a_magnitude: 1.0,
            tol: 1e-10,
            seed: 1729,
        }
    }
}

/// A parsed config file: the truncation knobs plus named grid set paths.
#[derive(Clone, Debug)]
pub struct LabConfig {
    pub trunc: TruncationConfig,
    /// Set file paths keyed by their config key, already resolved against
    /// the config file's directory.
    pub set_paths: BTreeMap<String, PathBuf>,
}

impl TruncationConfig {
    /// Largest Hermite index whose quadrature error the box can keep below
    /// roundoff-of-interest levels; see `buffer`.
    pub fn trusted_modes(&self) -> usize {
        self.hermite_cutoff - 1 - self.buffer
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key, msg: String| Err(ConfigError::Invalid { key, msg });
        if self.hermite_cutoff < 4 || self.hermite_cutoff > 512 {
            return bad("hermite_cutoff", format!("{} not in 4..=512", self.hermite_cutoff));
        }
        if self.buffer < 2 {
            return bad("buffer", format!("{} must be at least 2", self.buffer));
        }
        if self.buffer >= self.hermite_cutoff {
            return bad(
                "buffer",
                format!("{} leaves no trusted modes below cutoff {}", self.buffer, self.hermite_cutoff),
            );
        }
        if self.theta_samples < 8 || !self.theta_samples.is_multiple_of(2) {
            return bad("theta_samples", format!("{} must be even and at least 8", self.theta_samples));
        }
        if !(self.quad_radius.is_finite() && self.quad_radius > 0.0) {
            return bad("quad_radius", format!("{} must be positive and finite", self.quad_radius));
        }
        if self.quad_points < 16 || !self.quad_points.is_multiple_of(2) {
            return bad("quad_points", format!("{} must be even and at least 16", self.quad_points));
        }
        if self.fock_degree < 2 || self.fock_degree > 64 {
            return bad("fock_degree", format!("{} not in 2..=64", self.fock_degree));
        }
        if self.quat_quad_points <= self.fock_degree {
            return bad(
                "quat_quad_points",
                format!(
                    "{} nodes cannot integrate degree {} monomial pairs exactly",
                    self.quat_quad_points, self.fock_degree
                ),
            );
        }
        if !(self.a_magnitude.is_finite() && self.a_magnitude > 0.0) {
            return bad("a_magnitude", format!("{} must be positive and finite", self.a_magnitude));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol", format!("{} must be positive and finite", self.tol));
        }
        Ok(())
    }

    /// Writes the flat `key = value` form, floats in shortest round trip
    /// notation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("hermite_cutoff = {}\n", self.hermite_cutoff));
        out.push_str(&format!("buffer = {}\n", self.buffer));
        out.push_str(&format!("theta_samples = {}\n", self.theta_samples));
        out.push_str(&format!("quad_radius = {}\n", self.quad_radius));
        out.push_str(&format!("quad_points = {}\n", self.quad_points));
        out.push_str(&format!("fock_degree = {}\n", self.fock_degree));
        out.push_str(&format!("quat_quad_points = {}\n", self.quat_quad_points));
        out.push_str(&format!("a_magnitude = {}\n", self.a_magnitude));
        out.push_str(&format!("tol = {}\n", self.tol));
        out.push_str(&format!("seed = {}\n", self.seed));
        out
    }
}

impl LabConfig {
    /// Parses `key = value` text.  `base` is the directory set paths are
    /// resolved against (the config file's parent when loading from disk).
    pub fn parse_str(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
                line: idx + 1,
                msg: format!("expected key = value, got {raw:?}"),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || !key.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_') {
                return Err(ConfigError::Parse {
                    line: idx + 1,
                    msg: format!("key {key:?} is not lower_snake_case"),
                });
            }
            if seen.insert(key.clone(), value).is_some() {
                return Err(ConfigError::Parse {
                    line: idx + 1,
                    msg: format!("duplicate key {key}"),
                });
            }
        }

        fn take<T: std::str::FromStr>(
            map: &mut BTreeMap<String, String>,
            key: &'static str,
        ) -> Result<T, ConfigError> {
            let raw = map.remove(key).ok_or(ConfigError::MissingKey(key))?;
            raw.parse().map_err(|_| ConfigError::Invalid {
                key,
                msg: format!("cannot parse {raw:?}"),
            })
        }

        let trunc = TruncationConfig {
            hermite_cutoff: take(&mut seen, "hermite_cutoff")?,
            buffer: take(&mut seen, "buffer")?,
            theta_samples: take(&mut seen, "theta_samples")?,
            quad_radius: take(&mut seen, "quad_radius")?,
            quad_points: take(&mut seen, "quad_points")?,
            fock_degree: take(&mut seen, "fock_degree")?,
            quat_quad_points: take(&mut seen, "quat_quad_points")?,
            a_magnitude: take(&mut seen, "a_magnitude")?,
            tol: take(&mut seen, "tol")?,
            seed: take(&mut seen, "seed")?,
        };
        trunc.validate()?;

        let mut set_paths = BTreeMap::new();
        for (key, value) in seen {
            if key.contains("_set") {
                set_paths.insert(key, base.join(value));
            } else {
                return Err(ConfigError::Parse {
                    line: 0,
                    msg: format!("unknown key {key}"),
                });
            }
        }
        Ok(Self { trunc, set_paths })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse_str(&text, base)
    }

    /// Path registered under `key`, or a config error naming it.
    pub fn set_path(&self, key: &str) -> Result<&Path, ConfigError> {
        self.set_paths
            .get(key)
            .map(PathBuf::as_path)
            .ok_or(ConfigError::Parse {
                line: 0,
                msg: format!("config does not name a {key} file"),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_bit_exact() {
        let cfg = TruncationConfig::default();
        let text = cfg.to_text();
        let parsed = LabConfig::parse_str(&text, Path::new(".")).unwrap();
        assert_eq!(parsed.trunc, cfg);
        // And the written form is stable under a second pass.
        assert_eq!(parsed.trunc.to_text(), text);
    }

    #[test]
    fn awkward_floats_round_trip() {
        let cfg = TruncationConfig {
            quad_radius: 7.300000000000001,
            tol: 3.141592653589793e-11,
            a_magnitude: 0.1,
            ..TruncationConfig::default()
        };
        let parsed = LabConfig::parse_str(&cfg.to_text(), Path::new(".")).unwrap();
        assert_eq!(parsed.trunc, cfg);
    }

    #[test]
    fn set_keys_resolve_against_base() {
        let text = format!("{}hmg_set_1 = sets/square.set\n", TruncationConfig::default().to_text());
        let parsed = LabConfig::parse_str(&text, Path::new("/tmp/cfgdir")).unwrap();
        assert_eq!(
            parsed.set_path("hmg_set_1").unwrap(),
            Path::new("/tmp/cfgdir/sets/square.set")
        );
        assert!(parsed.set_path("hmg_set_2").is_err());
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let base = Path::new(".");
        let mut text = TruncationConfig::default().to_text();
        text.push_str("mystery = 3\n");
        assert!(LabConfig::parse_str(&text, base).is_err());

        let mut text = TruncationConfig::default().to_text();
        text.push_str("seed = 4\n");
        assert!(LabConfig::parse_str(&text, base).is_err());
    }

    #[test]
    fn rejects_configs_without_headroom() {
        let mut cfg = TruncationConfig::default();
        cfg.buffer = cfg.hermite_cutoff;
        assert!(LabConfig::parse_str(&cfg.to_text(), Path::new(".")).is_err());

        let mut cfg = TruncationConfig::default();
        cfg.quat_quad_points = cfg.fock_degree;
        assert!(LabConfig::parse_str(&cfg.to_text(), Path::new(".")).is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# run of 2026-08-22\n\n{}", TruncationConfig::default().to_text());
        assert!(LabConfig::parse_str(&text, Path::new(".")).is_ok());
    }
}

//! Run configuration, loadable from TOML or JSON.

use std::path::{Path, PathBuf};

use padic_roots::padic::{default_precision, SAFETY_MARGIN};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// The ball `center + p^digits Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: u64,
    pub digits: u32,
}

impl Ball {
    pub fn contains(&self, p: u64, x: u64) -> bool {
        let m = p.pow(self.digits);
        x % m == self.center % m
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallPair {
    pub u: Ball,
    pub v: Ball,
}

/// Acceptance levels for comparisons against exact values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Two-sided band in standard errors.
    pub z: f64,
    /// Family-wise level of the histogram chi-square tests.
    pub chi_square_level: f64,
    /// Cells with a smaller expected count are pooled.
    pub min_expected: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            z: 4.0,
            chi_square_level: 0.01,
            min_expected: 5.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub p: u64,
    pub degrees: Vec<u32>,
    pub samples: u64,
    /// Working precision; `None` picks the default for p.
    pub precision: Option<u32>,
    pub seed: u64,
    /// Largest degree of cataloged extensions to census.
    pub max_ext_degree: u32,
    /// Histogram classes are taken modulo p^depth; `None` picks 5 at p = 2
    /// and 2 otherwise.
    pub depth: Option<u32>,
    /// Quadratic fields with spatial histograms; empty means all.
    pub histogram_fields: Vec<String>,
    /// Ball pairs for the covariance census; `None` picks the preset.
    pub balls: Option<Vec<BallPair>>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub thresholds: Thresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::preset(2)
    }
}

impl RunConfig {
    /// The desk-scale replication preset for p.
    pub fn preset(p: u64) -> Self {
        RunConfig {
            p,
            degrees: (1..=5).collect(),
            samples: 500_000,
            precision: None,
            seed: 20240601,
            max_ext_degree: 3,
            depth: None,
            histogram_fields: Vec::new(),
            balls: None,
            workers: None,
            out: None,
            thresholds: Thresholds::default(),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth.unwrap_or(if self.p == 2 { 5 } else { 2 })
    }

    pub fn balls(&self) -> Vec<BallPair> {
        if let Some(b) = &self.balls {
            return b.clone();
        }
        if self.p == 2 {
            vec![
                BallPair {
                    u: Ball {
                        center: 0,
                        digits: 1,
                    },
                    v: Ball {
                        center: 1,
                        digits: 1,
                    },
                },
                BallPair {
                    u: Ball {
                        center: 0,
                        digits: 2,
                    },
                    v: Ball {
                        center: 2,
                        digits: 2,
                    },
                },
                BallPair {
                    u: Ball {
                        center: 0,
                        digits: 0,
                    },
                    v: Ball {
                        center: 0,
                        digits: 2,
                    },
                },
            ]
        } else {
            vec![BallPair {
                u: Ball {
                    center: 0,
                    digits: 1,
                },
                v: Ball {
                    center: 1,
                    digits: 1,
                },
            }]
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision.unwrap_or_else(|| default_precision(self.p))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if ![2, 3, 5, 7].contains(&self.p) {
            return bad(format!("p = {} is not a supported prime", self.p));
        }
        if self.samples == 0 {
            return bad("samples must be ≥ 1".into());
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&n| n == 0 || n > 12) {
            return bad("degrees must lie in 1..=12".into());
        }
        if !(1..=3).contains(&self.max_ext_degree) {
            return bad("extension scope must be 1, 2 or 3".into());
        }
        let prec = self.precision();
        if prec > padic_roots::padic::max_precision(self.p) || prec <= SAFETY_MARGIN as u32 {
            return bad(format!("precision {prec} out of range for p = {}", self.p));
        }
        if self.depth() + SAFETY_MARGIN as u32 > prec {
            return bad(format!(
                "histogram depth {} exceeds N − {SAFETY_MARGIN}",
                self.depth()
            ));
        }
        if (self.p as f64).powi(2 * self.depth() as i32) > (1u64 << 22) as f64 {
            return bad("histogram grid too large".into());
        }
        for b in &self.balls() {
            if b.u.digits + SAFETY_MARGIN as u32 > prec || b.v.digits + SAFETY_MARGIN as u32 > prec
            {
                return bad("ball radius beyond the working precision".into());
            }
        }
        Ok(())
    }

    /// Read a TOML or JSON file, chosen by extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => {
                serde_json::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?
            }
            _ => toml::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip() {
        let cfg = RunConfig::preset(5);
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg: RunConfig = toml::from_str("p = 2\nsamples = 10\nseed = 3\n").unwrap();
        assert_eq!(cfg.samples, 10);
        assert_eq!(cfg.degrees, vec![1, 2, 3, 4, 5]);
        cfg.validate().unwrap();
        let cfg: RunConfig = serde_json::from_str(r#"{"p": 5, "samples": 10}"#).unwrap();
        assert_eq!(cfg.depth(), 2);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_deep_histograms() {
        let cfg = RunConfig {
            depth: Some(45),
            ..RunConfig::preset(2)
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            samples: 0,
            ..RunConfig::preset(2)
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn balls() {
        let b = Ball {
            center: 2,
            digits: 2,
        };
        assert!(b.contains(2, 6));
        assert!(!b.contains(2, 4));
        assert!(Ball {
            center: 0,
            digits: 0
        }
        .contains(2, 7));
    }
}

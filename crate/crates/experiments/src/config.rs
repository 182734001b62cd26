//! Experiment configuration, loadable from TOML.
//!
//! Keys are the field names of [`ExperimentConfig`]. Unknown keys are
//! rejected so a typo cannot silently fall back to a default.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qaud::PilotScheme;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ExpError, ExpResult};

/// SNR grid used by the SNR sweep, in dB.
pub const DEFAULT_SNR_DB: [f64; 8] = [0.0, 2.5, 5.0, 7.5, 10.0, 15.0, 20.0, f64::INFINITY];

/// Precision levels for the SNR sweep, the demo and the calibration-free runs.
pub const DEFAULT_EPSILON: [f64; 3] = [0.1, 0.01, 0.001];

/// Precision levels traced by the error-rate against annealing-time curve.
pub const DEFAULT_TIME_EPSILON: [f64; 9] = [0.3, 0.1, 0.03, 0.01, 0.003, 0.001, 0.0006, 0.0003, 0.0002];

pub const DEFAULT_K_SWEEP: [usize; 5] = [1, 10, 100, 1000, 10000];

/// Number of antennas, or a request to calibrate it per scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    Calibrate,
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Fixed(k) => write!(f, "{k}"),
            KChoice::Calibrate => f.write_str("calibrate"),
        }
    }
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("calibrate") {
            return Ok(KChoice::Calibrate);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            _ => Err(format!("k must be a positive integer or 'calibrate', got '{s}'")),
        }
    }
}

impl Serialize for KChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KChoice::Fixed(k) => s.serialize_u64(*k as u64),
            KChoice::Calibrate => s.serialize_str("calibrate"),
        }
    }
}

impl<'de> Deserialize<'de> for KChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(k) => format!("{k}").parse().map_err(serde::de::Error::custom),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

mod scheme_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[PilotScheme], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|p| p.as_str()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<PilotScheme>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            One(String),
            Many(Vec<String>),
        }
        let names = match Repr::deserialize(d)? {
            Repr::One(s) => vec![s],
            Repr::Many(v) => v,
        };
        names
            .iter()
            .map(|s| s.parse().map_err(|e: qaud::Error| serde::de::Error::custom(e.to_string())))
            .collect()
    }
}

/// Everything that determines an experiment's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(with = "scheme_list", alias = "schemes")]
    pub scheme: Vec<PilotScheme>,
    pub m: usize,
    pub n: usize,
    pub k: KChoice,
    pub snr_db: Vec<f64>,
    pub p_active: f64,
    /// Precision levels; `None` lets each command pick its own sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    pub n_trials: usize,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    pub k_sweep: Vec<usize>,
    pub target_aer: f64,
    pub k_max: usize,
    pub calibration_trials: usize,
    pub gap_samples: usize,
    pub grid_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Largest Magnus step of the state evolution.
    pub max_step: f64,
    /// SNR of the error-rate against annealing-time curve.
    pub time_snr_db: f64,
    /// Rows kept per trace in the annealing demo.
    pub demo_points: usize,
    /// Trial index of the demo instance.
    pub demo_instance: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: PilotScheme::ALL.to_vec(),
            m: 4,
            n: 5,
            k: KChoice::Calibrate,
            snr_db: DEFAULT_SNR_DB.to_vec(),
            p_active: 0.5,
            epsilon: None,
            n_trials: 10_000,
            master_seed: 0,
            output_path: None,
            k_sweep: DEFAULT_K_SWEEP.to_vec(),
            target_aer: 1e-3,
            k_max: 1 << 16,
            calibration_trials: 10_000,
            gap_samples: 500,
            grid_points: qaud::annealer::DEFAULT_GRID_POINTS,
            cache_dir: None,
            max_step: 1.0,
            time_snr_db: 10.0,
            demo_points: 400,
            demo_instance: 0,
        }
    }
}

impl ExperimentConfig {
    /// Defaults with the reduced trial count used for quick checks.
    pub fn smoke() -> Self {
        Self {
            n_trials: 1000,
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> ExpResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> ExpResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ExpError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| ExpError::Config(format!("{}: {e}", path.display())))
    }

    /// TOML rendering; parsing it back yields an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config fields are all representable in TOML")
    }

    /// Precision levels, falling back to `default` when none were given.
    pub fn epsilons_or(&self, default: &[f64]) -> Vec<f64> {
        self.epsilon.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn validate(&self) -> ExpResult<()> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if self.scheme.is_empty() {
            return bad("at least one scheme is required".into());
        }
        if self.m == 0 || self.m >= self.n {
            return bad(format!("need 1 <= m < n, got m = {}, n = {}", self.m, self.n));
        }
        if !(0.0..=1.0).contains(&self.p_active) {
            return bad(format!("p_active {} outside [0, 1]", self.p_active));
        }
        if self.snr_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return bad("snr_db values must be finite or +inf".into());
        }
        if let Some(eps) = &self.epsilon {
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                return bad("epsilon values must be positive and finite".into());
            }
        }
        if self.n_trials == 0 || self.calibration_trials == 0 || self.gap_samples == 0 {
            return bad("trial and sample counts must be positive".into());
        }
        if self.k_sweep.iter().any(|&k| k == 0) {
            return bad("k_sweep entries must be positive".into());
        }
        if let KChoice::Fixed(0) = self.k {
            return bad("k must be positive".into());
        }
        if !(self.target_aer > 0.0) {
            return bad(format!("target_aer {} must be positive", self.target_aer));
        }
        if self.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        if self.grid_points < 2 {
            return bad("grid_points must be >= 2".into());
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return bad(format!("max_step {} must be positive", self.max_step));
        }
        if self.time_snr_db.is_nan() {
            return bad("time_snr_db is NaN".into());
        }
        if self.demo_points < 2 {
            return bad("demo_points must be >= 2".into());
        }
        Ok(())
    }
}

/// Parses an SNR value in dB; `inf` means noiseless.
pub fn parse_snr(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| format!("'{s}' is not an SNR in dB")),
    }
}

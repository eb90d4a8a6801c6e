//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[geometry]`,
//! `[link_budget]`, `[scheduler]`, `[cognitive]`, `[sweep]`, `[metrics]` and
//! `[output]`. Every key is optional and falls back to the built-in default;
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use dualsat_core::architectures::Architecture;
use dualsat_core::channel::LinkBudget;
use dualsat_core::metrics::DEFAULT_UNAVAILABLE_THRESHOLD;
use dualsat_core::system::{CognitiveConfig, GeometryConfig, SchedulerConfig, System, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub start_dbw: f64,
    pub stop_dbw: f64,
    pub step_db: f64,
    pub drops: usize,
    pub seed: u64,
    pub architectures: Vec<Architecture>,
    /// Power levels whose per-user rates are kept for distribution plots.
    pub cdf_powers_dbw: Vec<f64>,
    /// Redraws allowed per drop after numerical failures.
    pub max_attempts: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start_dbw: -5.0,
            stop_dbw: 50.0,
            step_db: 2.5,
            drops: 200,
            seed: 1,
            architectures: Architecture::ALL.to_vec(),
            cdf_powers_dbw: vec![5.0, 22.5, 40.0],
            max_attempts: 32,
        }
    }
}

impl SweepConfig {
    /// Grid `start, start + step, ...` up to `stop` (inclusive within rounding).
    pub fn powers(&self) -> Vec<f64> {
        let n = ((self.stop_dbw - self.start_dbw) / self.step_db + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start_dbw + i as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub unavailable_threshold: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            unavailable_threshold: DEFAULT_UNAVAILABLE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("results"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub scenario_id: String,
    pub geometry: GeometryConfig,
    pub link_budget: LinkBudget,
    pub scheduler: SchedulerConfig,
    pub cognitive: CognitiveConfig,
    pub sweep: SweepConfig,
    pub metrics: MetricsConfig,
    pub output: OutputConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            scenario_id: "default".into(),
            geometry: GeometryConfig::default(),
            link_budget: LinkBudget::default(),
            scheduler: SchedulerConfig::default(),
            cognitive: CognitiveConfig::default(),
            sweep: SweepConfig::default(),
            metrics: MetricsConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| HarnessError::config("<document>", e.to_string()))?;
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            HarnessError::config(path, e.into_inner().message().to_string())
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(path.display().to_string(), format!("cannot read scenario: {e}")))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn system_config(&self) -> SystemConfig {
        SystemConfig {
            geometry: self.geometry,
            link_budget: self.link_budget,
            scheduler: self.scheduler,
            cognitive: self.cognitive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        fn err(path: impl Into<String>, message: impl Into<String>) -> HarnessError {
            HarnessError::config(path, message)
        }
        if self.scenario_id.is_empty() || self.scenario_id.contains(['/', '\\', ',', '\n']) {
            return Err(err("scenario_id", "must be a non-empty name without separators"));
        }
        if !s.start_dbw.is_finite() || !s.stop_dbw.is_finite() {
            return Err(err("sweep.start_dbw", "sweep bounds must be finite"));
        }
        if s.start_dbw > s.stop_dbw {
            return Err(err("sweep.start_dbw", "must not exceed sweep.stop_dbw"));
        }
        if !(s.step_db > 0.0) || !s.step_db.is_finite() {
            return Err(err("sweep.step_db", "must be positive"));
        }
        if s.drops == 0 {
            return Err(err("sweep.drops", "must be at least 1"));
        }
        if s.max_attempts == 0 {
            return Err(err("sweep.max_attempts", "must be at least 1"));
        }
        if s.architectures.is_empty() {
            return Err(err("sweep.architectures", "must name at least one architecture"));
        }
        for (i, a) in s.architectures.iter().enumerate() {
            if s.architectures[..i].contains(a) {
                return Err(err(
                    format!("sweep.architectures[{i}]"),
                    format!("duplicate architecture `{a}`"),
                ));
            }
        }
        if s.cdf_powers_dbw.iter().any(|p| !p.is_finite()) {
            return Err(err("sweep.cdf_powers_dbw", "must be finite"));
        }
        if !(self.metrics.unavailable_threshold >= 0.0) {
            return Err(err("metrics.unavailable_threshold", "must be nonnegative"));
        }
        System::new(self.system_config()).map_err(|e| match e {
            dualsat_core::Error::InvalidParameter { name, reason } => err(name, reason),
            other => err("<system>", other.to_string()),
        })?;
        Ok(())
    }
}

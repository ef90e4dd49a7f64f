use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::classify::{Optimizer, ScgSettings};
use crate::decision::{PlanningRule, UtilityTables};
use crate::transition::DEFAULT_TARGET;
use crate::truss::TrussConfig;

/// Name accepted in place of a config path for the built-in settings.
pub const DEFAULT_PRESET: &str = "default";
/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "RISKGRAPH_OUT";

/// Cost grids for the sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub failure_costs: Vec<f64>,
    pub maintenance_costs: Vec<f64>,
    /// Maintenance cost held fixed in the accuracy-vs-cost sweep.
    pub fixed_maintenance_cost: f64,
    pub step_cap: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            failure_costs: vec![100.0, 185.0, 285.0, 400.0, 600.0, 1000.0, 2000.0, 5000.0],
            maintenance_costs: vec![25.0, 50.0, 100.0, 200.0, 400.0],
            fixed_maintenance_cost: 100.0,
            step_cap: crate::decision::DEFAULT_STEP_CAP,
        }
    }
}

/// Every setting of the case study. Unknown keys are rejected.
///
/// ```toml
/// seed = 7
/// repetitions = 100
/// noise_rms = 1.0            # microstrain
/// train_loads = [10.0, 20.0, 30.0]
/// validation_loads = [5.0, 15.0, 25.0]
/// output_dir = "out"
///
/// [utilities]
/// operational = 15.0
/// failed = -285.0
/// do_nothing = 0.0
/// maintain = -100.0
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub utilities: UtilityTables,
    /// kg; calibrated from `calibration_target` when absent.
    pub w_max: Option<f64>,
    pub calibration_target: f64,
    /// microstrain
    pub noise_rms: f64,
    pub repetitions: usize,
    pub validation_repetitions: usize,
    /// kg
    pub train_loads: Vec<f64>,
    /// kg
    pub validation_loads: Vec<f64>,
    /// Undamaged test samples per (load, location); damaged states get one each.
    pub undamaged_test_repetitions: usize,
    pub optimizer: Optimizer,
    pub planning_rule: PlanningRule,
    pub output_dir: PathBuf,
    pub truss: TrussConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            utilities: UtilityTables::default(),
            w_max: None,
            calibration_target: DEFAULT_TARGET,
            noise_rms: 1.0,
            repetitions: 100,
            validation_repetitions: 20,
            train_loads: vec![10.0, 20.0, 30.0],
            validation_loads: vec![5.0, 15.0, 25.0],
            undamaged_test_repetitions: 8,
            optimizer: Optimizer::Scg(ScgSettings { max_iterations: 300, ..ScgSettings::default() }),
            planning_rule: PlanningRule::Myopic,
            output_dir: PathBuf::from("out"),
            truss: TrussConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads `source`, or returns the defaults when it is [`DEFAULT_PRESET`].
    pub fn load(source: &str) -> Result<Self, HarnessError> {
        if source == DEFAULT_PRESET {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(source).map_err(|e| HarnessError::Io { path: source.into(), source: e })?;
        Self::from_toml(&text)
    }

    /// Applies [`OUTPUT_DIR_ENV`] if it is set and non-empty.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
        self
    }

    pub fn output_dir(&self) -> &Path {
        &self.output_dir
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        self.utilities.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(w) = self.w_max {
            if !(w.is_finite() && w > 0.0) {
                return bad(format!("w_max must be positive, got {w}"));
            }
        }
        if !(0.0..1.0).contains(&self.calibration_target) {
            return bad(format!("calibration_target must lie in [0, 1), got {}", self.calibration_target));
        }
        if !(self.noise_rms.is_finite() && self.noise_rms >= 0.0) {
            return bad(format!("noise_rms must be non-negative, got {}", self.noise_rms));
        }
        if self.repetitions == 0 || self.validation_repetitions == 0 || self.undamaged_test_repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        for (name, loads) in [("train_loads", &self.train_loads), ("validation_loads", &self.validation_loads)] {
            if loads.is_empty() || loads.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return bad(format!("{name} must be non-empty and positive"));
            }
        }
        let s = &self.sweep;
        if s.failure_costs.is_empty() || s.maintenance_costs.is_empty() {
            return bad("sweep grids must be non-empty".into());
        }
        if s.failure_costs.iter().chain(&s.maintenance_costs).chain([&s.fixed_maintenance_cost]).any(|c| !c.is_finite()) {
            return bad("sweep costs must be finite".into());
        }
        Ok(())
    }
}

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pipeline::{decision_stage, Pipeline};
use super::{ExperimentConfig, HarnessError, StageExt};
use crate::decision::{decision_accuracy, transitions_until_maintenance, MaintenanceTiming};
use crate::faulttree::{HealthState, N_STATES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    TimeToMaintenance,
    AccuracyVsCost,
}

impl FromStr for SweepMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "time-to-maintenance" | "time" => Ok(SweepMode::TimeToMaintenance),
            "accuracy-vs-cost" | "accuracy" => Ok(SweepMode::AccuracyVsCost),
            other => Err(HarnessError::Config(format!("unknown sweep mode {other:?}"))),
        }
    }
}

/// Decision accuracy at one failure cost for classifier beliefs and for
/// the uniform belief over the classifier's nine states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostAccuracy {
    pub failure_cost: f64,
    pub classifier: f64,
    pub uniform: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepOutput {
    Timing(Vec<MaintenanceTiming>),
    Accuracy(Vec<CostAccuracy>),
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match self {
            SweepOutput::Timing(rows) => {
                s.push_str("failure_cost,maintenance_cost,steps\n");
                for r in rows {
                    let steps = r.steps.map_or_else(|| "never".to_string(), |n| n.to_string());
                    writeln!(s, "{},{},{steps}", r.failure_cost, r.maintenance_cost).unwrap();
                }
            }
            SweepOutput::Accuracy(rows) => {
                s.push_str("failure_cost,classifier_accuracy,uniform_accuracy\n");
                for r in rows {
                    writeln!(s, "{},{},{}", r.failure_cost, r.classifier, r.uniform).unwrap();
                }
            }
        }
        s
    }
}

/// Equal mass on the undamaged state and the eight single failures.
pub fn uniform_support_belief() -> Vec<f64> {
    let support = HealthState::classifier_support();
    let mut b = vec![0.0; N_STATES];
    for h in &support {
        b[h.index()] = 1.0 / support.len() as f64;
    }
    b
}

/// Overall decision accuracy against the true-state oracle for each
/// failure cost, with the maintenance cost fixed.
pub fn accuracy_vs_cost(
    pipeline: &Pipeline,
    failure_costs: &[f64],
    maintenance_cost: f64,
) -> Result<Vec<CostAccuracy>, HarnessError> {
    let uniform = uniform_support_belief();
    let mut out = Vec::with_capacity(failure_costs.len());
    for &c_f in failure_costs {
        let model = pipeline.decision.with_utilities(pipeline.decision.utilities.with_costs(c_f, maintenance_cost));
        let (decided, oracle) = pipeline.decide(&model)?;
        let (baseline, _) = pipeline.decide_with(&model, |_| uniform.clone())?;
        out.push(CostAccuracy {
            failure_cost: c_f,
            classifier: decision_accuracy(&decided, &oracle).stage("decide")?.overall.accuracy(),
            uniform: decision_accuracy(&baseline, &oracle).stage("decide")?.overall.accuracy(),
        });
    }
    Ok(out)
}

/// Runs one sweep over the config's grids. The accuracy sweep trains the
/// full classifier; the timing sweep needs only the transition model.
pub fn sweep_costs(config: &ExperimentConfig, mode: SweepMode) -> Result<SweepOutput, HarnessError> {
    let grid = &config.sweep;
    match mode {
        SweepMode::TimeToMaintenance => {
            let (_, _, _, model) = decision_stage(config)?;
            let rows = transitions_until_maintenance(
                &model,
                &grid.failure_costs,
                &grid.maintenance_costs,
                config.planning_rule,
                grid.step_cap,
            )
            .stage("sweep")?;
            Ok(SweepOutput::Timing(rows))
        }
        SweepMode::AccuracyVsCost => {
            let pipeline = Pipeline::build(config)?;
            Ok(SweepOutput::Accuracy(accuracy_vs_cost(&pipeline, &grid.failure_costs, grid.fixed_maintenance_cost)?))
        }
    }
}

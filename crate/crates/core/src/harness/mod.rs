//! End-to-end experiment: dataset synthesis, classifier training, decisions
//! on a held-out test set, cost sweeps and report files.

mod config;
mod pipeline;
mod report;
mod sweep;
mod synth;

pub use config::{ExperimentConfig, SweepConfig, DEFAULT_PRESET, OUTPUT_DIR_ENV};
pub use pipeline::{decision_stage, run_case_study, CaseStudyReport, Pipeline, TestCase};
pub use report::{write_bundle, BUNDLE_FILES};
pub use sweep::{accuracy_vs_cost, sweep_costs, uniform_support_belief, CostAccuracy, SweepMode, SweepOutput};
pub use synth::{clean_strains, synthesize_dataset, LabelledSample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("[{stage}] {message}")]
    Stage { stage: &'static str, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl HarnessError {
    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(&dyn std::fmt::Display) -> HarnessError {
        move |e| HarnessError::Stage { stage, message: e.to_string() }
    }
}

/// Tags an error from one pipeline stage.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, HarnessError>;
}

impl<T, E: std::fmt::Display> StageExt<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, HarnessError> {
        self.map_err(|e| HarnessError::stage(stage)(&e))
    }
}

#[cfg(test)]
mod tests;

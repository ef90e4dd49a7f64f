//! Health-state transition matrices for the do-nothing and maintenance
//! actions.

mod build;
mod matrix;

pub use build::{
    build_transition, calibrate_wmax, delta_health, transition_counts, Calibration, LoadGrid, StressResponse,
    DEFAULT_TARGET, WMAX_BRACKET,
};
pub use matrix::{maintenance_matrix, TransitionMatrix, ROW_TOLERANCE};

use thiserror::Error;

use crate::truss::TrussError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransitionError {
    #[error("transition matrix needs 65536 entries, got {0}")]
    Shape(usize),
    #[error("row {state}: {reason}")]
    Row { state: u8, reason: String },
    #[error("transition CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("invalid load grid: {0}")]
    Grid(String),
    #[error("calibration target {0} must lie in [0, 1)")]
    Target(f64),
    #[error(transparent)]
    Truss(#[from] TrussError),
}

#[cfg(test)]
mod tests;

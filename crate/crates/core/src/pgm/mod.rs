//! Discrete factors, Bayesian networks and exact inference.

mod elimination;
mod factor;
mod network;

pub use elimination::{infer, probability};
pub use factor::{Factor, Variable};
pub use network::{DiscreteNetwork, BRUTEFORCE_LIMIT, CPD_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PgmError {
    #[error("variable `{variable}` has {left} states in one factor and {right} in another")]
    CardinalityMismatch { variable: String, left: usize, right: usize },
    #[error("variable `{0}` is not in the factor scope")]
    NotInScope(String),
    #[error("state {state} is out of range for `{variable}` ({cardinality} states)")]
    StateOutOfRange { variable: String, state: usize, cardinality: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is already defined")]
    DuplicateVariable(String),
    #[error("variable `{0}` is both queried and observed")]
    QueryEvidenceOverlap(String),
    #[error("invalid CPD for `{variable}`: {reason}")]
    InvalidCpd { variable: String, reason: String },
    #[error("evidence has zero probability under the network")]
    InconsistentEvidence,
    #[error("joint table would have {entries} entries (limit {limit})")]
    TooLarge { entries: usize, limit: usize },
    #[error("{0}")]
    Structure(String),
}

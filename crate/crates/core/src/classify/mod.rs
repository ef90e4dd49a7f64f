//! Statistical classifier: a Gaussian novelty detector on the first
//! principal component of the strains, and an MLP localiser over the eight
//! single cross-member failures. Together they give `P(H | strains)`.

mod belief;
mod mlp;
mod novelty;
mod optim;
mod train;

pub use belief::{fuse_belief, Classifier, ClassifierBelief};
pub use mlp::{Mlp, LOCALISER_SIZES};
pub use novelty::{novelty_tail, NoveltyDetector, Pca, CONFIDENCE_INSIDE, NOVELTY_COMPONENTS, Z_LIMIT};
pub use optim::{gd_momentum, scg, Objective, OptimReport, Optimizer, ScgSettings};
pub use train::{accuracy, train_localiser, Dataset, TrainConfig, TrainReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("cannot fit: {0}")]
    Fit(String),
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("label {label} outside 1..={classes}")]
    Label { label: usize, classes: usize },
    #[error("training failed: {0}")]
    Training(String),
    #[error("invalid probability input: {0}")]
    Probability(String),
    #[error("model file: {0}")]
    Format(String),
}

//! Risk-based maintenance decisions for a monitored four-bay truss.
//!
//! The pieces, bottom up:
//!
//! - [`pgm`]: discrete factors, Bayesian networks and exact inference by
//!   variable elimination.
//! - [`faulttree`]: AND/OR fault trees, their compilation to networks, and
//!   the 8-bit cross-member [`HealthState`].
//! - [`truss`]: linear-elastic pin-jointed frame solved by the direct
//!   stiffness method.
//! - [`transition`]: health-state transition matrices from exhaustive load
//!   sweeps over the frame.
//! - [`classify`]: PCA novelty detector and MLP localiser giving a belief
//!   over health states from measured strains.
//! - [`decision`]: three-slice influence diagram, optimal strategies and
//!   decision scoring.
//! - [`harness`]: dataset synthesis, the end-to-end case study and sweeps.

pub mod classify;
pub mod decision;
pub mod faulttree;
pub mod harness;
pub mod pgm;
pub mod transition;
pub mod truss;

pub use classify::{fuse_belief, Classifier, ClassifierBelief, ClassifyError, Mlp, NoveltyDetector};
pub use decision::{Action, DecisionError, DecisionModel, Strategy, UtilityTables};
pub use faulttree::{FaultTree, FaultTreeError, HealthState};
pub use harness::{ExperimentConfig, HarnessError, LabelledSample};
pub use pgm::{DiscreteNetwork, Factor, PgmError, Variable};
pub use transition::{TransitionError, TransitionMatrix};
pub use truss::{LoadCase, TrussError, TrussModel};

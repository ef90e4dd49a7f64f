//! Maintenance decisions over the unrolled influence diagram.
//!
//! The diagram has three health slices `H_0, H_1, H_2`, each with a
//! failure node `F_t` (the fault tree evaluated on `H_t`) and a utility
//! `U(F_t)`, and two decisions `d_0, d_1` with utilities `U(d_t)`. The
//! features are observed once, before `d_0`; `d_1` only remembers `d_0`.
//! A strategy is therefore a pair of actions, and all four are enumerated
//! exactly.

mod model;
mod score;
mod sweep;

pub use model::{point_belief, DecisionModel, StrategyValue, UtilityTables};
pub use score::{decision_accuracy, ActionConfusion, DecisionScore};
pub use sweep::{transitions_until_maintenance, MaintenanceTiming, PlanningRule, DEFAULT_STEP_CAP};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::faulttree::FaultTreeError;

#[cfg(test)]
mod tests;

/// The single binary maintenance decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    DoNothing,
    Maintain,
}

impl Action {
    /// Enumeration order; the cheaper action comes first.
    pub const ALL: [Action; 2] = [Action::DoNothing, Action::Maintain];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Action::DoNothing => "do-nothing",
            Action::Maintain => "maintain",
        }
    }
}

/// Actions for the two decision slices. The second decision observes only
/// the first, so within a strategy it is a single fixed action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub first: Action,
    pub second: Action,
}

impl Strategy {
    pub const fn new(first: Action, second: Action) -> Self {
        Self { first, second }
    }

    /// All four strategies, do-nothing first at each slice.
    pub fn all() -> [Strategy; 4] {
        use Action::*;
        [
            Strategy::new(DoNothing, DoNothing),
            Strategy::new(DoNothing, Maintain),
            Strategy::new(Maintain, DoNothing),
            Strategy::new(Maintain, Maintain),
        ]
    }

    pub fn actions(self) -> [Action; 2] {
        [self.first, self.second]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecisionError {
    #[error("invalid belief: {0}")]
    Belief(String),
    #[error("invalid decision model: {0}")]
    Model(String),
    #[error("decided and oracle sequences differ in length ({decided} vs {oracle})")]
    LengthMismatch { decided: usize, oracle: usize },
    #[error(transparent)]
    FaultTree(#[from] FaultTreeError),
}

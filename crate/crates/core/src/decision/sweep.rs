use serde::{Deserialize, Serialize};

use super::model::point_belief;
use super::{Action, DecisionError, DecisionModel, UtilityTables};
use crate::faulttree::HealthState;

/// Default limit on simulated transitions before giving up.
pub const DEFAULT_STEP_CAP: usize = 10_000;

/// How the per-step maintenance decision is made while the undamaged truss
/// is left to degrade.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanningRule {
    /// One-step lookahead with the closed-form threshold.
    #[default]
    Myopic,
    /// First action of the three-slice optimal strategy.
    Horizon,
}

/// Transitions survived before maintenance is first chosen; `None` when
/// maintenance is never chosen within the step cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceTiming {
    pub failure_cost: f64,
    pub maintenance_cost: f64,
    pub steps: Option<usize>,
}

/// For each (failure cost, maintenance cost) pair, starts from the
/// undamaged state and propagates the do-nothing belief until the rule
/// first chooses maintenance. Other utilities stay as in `model`.
pub fn transitions_until_maintenance(
    model: &DecisionModel,
    failure_costs: &[f64],
    maintenance_costs: &[f64],
    rule: PlanningRule,
    cap: usize,
) -> Result<Vec<MaintenanceTiming>, DecisionError> {
    let mut out = Vec::with_capacity(failure_costs.len() * maintenance_costs.len());
    for &c_f in failure_costs {
        for &c_m in maintenance_costs {
            let m = model.with_utilities(model.utilities.with_costs(c_f, c_m));
            out.push(MaintenanceTiming { failure_cost: c_f, maintenance_cost: c_m, steps: steps_until_maintenance(&m, rule, cap)? });
        }
    }
    Ok(out)
}

fn steps_until_maintenance(model: &DecisionModel, rule: PlanningRule, cap: usize) -> Result<Option<usize>, DecisionError> {
    let u: &UtilityTables = &model.utilities;
    if rule == PlanningRule::Myopic && u.myopic_threshold() >= 1.0 {
        return Ok(None);
    }
    let mut belief = point_belief(HealthState::UNDAMAGED);
    for step in 0..cap {
        let action = match rule {
            PlanningRule::Myopic => model.myopic_decide(&belief)?,
            PlanningRule::Horizon => model.optimal_strategy(&belief)?.strategy.first,
        };
        if action == Action::Maintain {
            return Ok(Some(step));
        }
        let next = model.transition(Action::DoNothing).propagate(&belief);
        // a stationary belief will never trigger maintenance
        if next == belief {
            return Ok(None);
        }
        belief = next;
    }
    Ok(None)
}

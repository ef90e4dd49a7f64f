use serde::{Deserialize, Serialize};

use super::{Action, DecisionError, Strategy};
use crate::faulttree::{self, FaultTree, HealthState, BELIEF_TOLERANCE, N_STATES};
use crate::transition::TransitionMatrix;

/// Utilities of the failure event and of each action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityTables {
    /// `U(F = 0)`
    pub operational: f64,
    /// `U(F = 1)`
    pub failed: f64,
    /// `U(d = do nothing)`
    pub do_nothing: f64,
    /// `U(d = maintain)`
    pub maintain: f64,
}

impl Default for UtilityTables {
    fn default() -> Self {
        Self { operational: 15.0, failed: -285.0, do_nothing: 0.0, maintain: -100.0 }
    }
}

impl UtilityTables {
    /// Table values with failure cost `-U(F=1)` and maintenance cost
    /// `-U(d=maintain)` replaced.
    pub fn with_costs(self, failure_cost: f64, maintenance_cost: f64) -> Self {
        Self { failed: -failure_cost, maintain: -maintenance_cost, ..self }
    }

    pub fn action(&self, a: Action) -> f64 {
        match a {
            Action::DoNothing => self.do_nothing,
            Action::Maintain => self.maintain,
        }
    }

    /// Expected failure utility when the failure probability is `p`.
    pub fn failure(&self, p: f64) -> f64 {
        p * self.failed + (1.0 - p) * self.operational
    }

    /// `C_m / (U(F=0) + C_f)`: the next-slice failure probability above
    /// which maintenance pays for itself in a one-step lookahead.
    /// Infinite when failing is no worse than operating.
    pub fn myopic_threshold(&self) -> f64 {
        let gain = self.operational - self.failed;
        let cost = self.do_nothing - self.maintain;
        if gain <= 0.0 {
            f64::INFINITY
        } else {
            cost / gain
        }
    }

    pub fn validate(&self) -> Result<(), DecisionError> {
        if [self.operational, self.failed, self.do_nothing, self.maintain].iter().all(|u| u.is_finite()) {
            Ok(())
        } else {
            Err(DecisionError::Model("utilities must be finite".into()))
        }
    }
}

/// Expected utility of one strategy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyValue {
    pub strategy: Strategy,
    pub expected_utility: f64,
}

/// Transition models, failure map and utilities of the three-slice diagram.
#[derive(Clone, Debug)]
pub struct DecisionModel {
    tree: FaultTree,
    failure_map: Vec<bool>,
    do_nothing: TransitionMatrix,
    maintain: TransitionMatrix,
    pub utilities: UtilityTables,
}

impl DecisionModel {
    /// `tree` must have eight basic events listed in health-bit order.
    pub fn new(
        tree: FaultTree,
        do_nothing: TransitionMatrix,
        maintain: TransitionMatrix,
        utilities: UtilityTables,
    ) -> Result<Self, DecisionError> {
        utilities.validate()?;
        if tree.n_basic() != crate::faulttree::N_CROSS_MEMBERS {
            return Err(DecisionError::Model(format!(
                "fault tree has {} basic events, expected {}",
                tree.n_basic(),
                crate::faulttree::N_CROSS_MEMBERS
            )));
        }
        if do_nothing.action() != Action::DoNothing || maintain.action() != Action::Maintain {
            return Err(DecisionError::Model("transition matrices attached to the wrong actions".into()));
        }
        let failure_map = faulttree::truss_failure_map(&tree);
        if failure_map[0] {
            return Err(DecisionError::Model("undamaged state maps to failure".into()));
        }
        for h in HealthState::all() {
            for bit in 1..=8 {
                let more = h.union(HealthState::single(bit));
                if failure_map[h.index()] && !failure_map[more.index()] {
                    return Err(DecisionError::Model(format!("failure map not monotone at {h} -> {more}")));
                }
            }
        }
        Ok(Self { tree, failure_map, do_nothing, maintain, utilities })
    }

    pub fn with_utilities(&self, utilities: UtilityTables) -> Self {
        Self { utilities, ..self.clone() }
    }

    pub fn tree(&self) -> &FaultTree {
        &self.tree
    }

    pub fn failure_map(&self) -> &[bool] {
        &self.failure_map
    }

    pub fn transition(&self, a: Action) -> &TransitionMatrix {
        match a {
            Action::DoNothing => &self.do_nothing,
            Action::Maintain => &self.maintain,
        }
    }

    /// `P(F = 1)` as the belief-weighted failure map.
    pub fn failure_probability(&self, belief: &[f64]) -> Result<f64, DecisionError> {
        check_belief(belief)?;
        Ok(self.failure_mass(belief))
    }

    fn failure_mass(&self, belief: &[f64]) -> f64 {
        belief
            .iter()
            .zip(&self.failure_map)
            .filter(|(_, &f)| f)
            .map(|(p, _)| p)
            .sum::<f64>()
            .min(1.0)
    }

    /// `P(F = 1)` by exact inference on the fault-tree network with the
    /// belief attached as the distribution of the joint health node.
    pub fn failure_probability_via_network(&self, belief: &[f64]) -> Result<f64, DecisionError> {
        check_belief(belief)?;
        let net = faulttree::compile_with_state_node(&self.tree, belief)?;
        Ok(crate::pgm::probability(&net, &self.tree.top().id, 1, &[]).map_err(faulttree::FaultTreeError::from)?)
    }

    /// Expected utility of applying `actions` in sequence, charging the
    /// failure utility at every slice (`actions.len() + 1` slices).
    pub fn expected_utility(&self, belief: &[f64], actions: &[Action]) -> Result<f64, DecisionError> {
        check_belief(belief)?;
        let mut b = belief.to_vec();
        let mut eu = self.utilities.failure(self.failure_mass(&b));
        for &a in actions {
            eu += self.utilities.action(a);
            b = self.transition(a).propagate(&b);
            eu += self.utilities.failure(self.failure_mass(&b));
        }
        Ok(eu)
    }

    /// Expected utility of each of the four strategies, in enumeration order.
    pub fn evaluate_strategies(&self, belief: &[f64]) -> Result<[StrategyValue; 4], DecisionError> {
        check_belief(belief)?;
        let b0 = belief;
        let u0 = self.utilities.failure(self.failure_mass(b0));
        let mut out = [StrategyValue { strategy: Strategy::all()[0], expected_utility: 0.0 }; 4];
        let mut i = 0;
        for first in Action::ALL {
            let b1 = self.transition(first).propagate(b0);
            let u1 = self.utilities.failure(self.failure_mass(&b1));
            for second in Action::ALL {
                let b2 = self.transition(second).propagate(&b1);
                let u2 = self.utilities.failure(self.failure_mass(&b2));
                out[i] = StrategyValue {
                    strategy: Strategy::new(first, second),
                    expected_utility: u0 + self.utilities.action(first) + u1 + self.utilities.action(second) + u2,
                };
                i += 1;
            }
        }
        Ok(out)
    }

    /// The maximum-expected-utility strategy. Exact ties go to the earlier
    /// strategy in enumeration order, i.e. toward doing nothing.
    pub fn optimal_strategy(&self, belief: &[f64]) -> Result<StrategyValue, DecisionError> {
        let values = self.evaluate_strategies(belief)?;
        let mut best = values[0];
        for v in &values[1..] {
            if v.expected_utility > best.expected_utility {
                best = *v;
            }
        }
        Ok(best)
    }

    /// `P(F_{t+1} = 1)` if nothing is done now.
    pub fn next_failure_probability(&self, belief: &[f64]) -> Result<f64, DecisionError> {
        check_belief(belief)?;
        Ok(self.failure_mass(&self.do_nothing.propagate(belief)))
    }

    /// One-step lookahead: maintain iff the next-slice failure probability
    /// under doing nothing exceeds [`UtilityTables::myopic_threshold`].
    pub fn myopic_decide(&self, belief: &[f64]) -> Result<Action, DecisionError> {
        let p = self.next_failure_probability(belief)?;
        Ok(if p > self.utilities.myopic_threshold() { Action::Maintain } else { Action::DoNothing })
    }
}

pub(crate) fn check_belief(belief: &[f64]) -> Result<(), DecisionError> {
    if belief.len() != N_STATES {
        return Err(DecisionError::Belief(format!("expected {N_STATES} entries, got {}", belief.len())));
    }
    if belief.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(DecisionError::Belief("entries must be finite and non-negative".into()));
    }
    let total: f64 = belief.iter().sum();
    if (total - 1.0).abs() > BELIEF_TOLERANCE {
        return Err(DecisionError::Belief(format!("sums to {total}")));
    }
    Ok(())
}

/// Point-mass belief on one health state.
pub fn point_belief(h: HealthState) -> Vec<f64> {
    let mut b = vec![0.0; N_STATES];
    b[h.index()] = 1.0;
    b
}

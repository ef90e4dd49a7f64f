//! Fault tree to Bayesian network mapping.
//!
//! Every fault-tree event becomes one binary variable named after the
//! node id (state 1 = event occurred). Gates get deterministic CPDs whose
//! parents are the gate inputs in document order.

use std::collections::{BTreeMap, HashMap};

use super::tree::{FaultTree, NodeKind};
use super::FaultTreeError;
use crate::pgm::{self, DiscreteNetwork, Variable};

/// Name of the joint state variable added by [`compile_with_state_node`].
pub const STATE_NODE: &str = "H";

/// Tolerance on a belief summing to one.
pub const BELIEF_TOLERANCE: f64 = 1e-9;

/// Deterministic gate CPD over `n` binary inputs, inputs slowest.
pub fn gate_cpd(kind: NodeKind, n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(2 << n);
    for config in 0..(1usize << n) {
        // first input is the most significant bit of `config`
        let on = match kind {
            NodeKind::And => config == (1 << n) - 1,
            NodeKind::Or => config != 0,
            NodeKind::Basic => unreachable!("basic events have no gate table"),
        };
        table.extend_from_slice(if on { &[0.0, 1.0] } else { &[1.0, 0.0] });
    }
    table
}

/// Compiles the tree with basic-event priors taken from the tree (uniform
/// where unset).
pub fn compile_to_bn(tree: &FaultTree) -> Result<DiscreteNetwork, FaultTreeError> {
    compile(tree, |i, _| {
        let p = tree.nodes()[i].prior.unwrap_or(0.5);
        Ok(vec![1.0 - p, p])
    }, None)
}

/// Compiles the tree with a root variable [`STATE_NODE`] over all `2^n`
/// joint basic-event states; each basic event is a deterministic bit of
/// that state. `belief` becomes the root's distribution.
pub fn compile_with_state_node(tree: &FaultTree, belief: &[f64]) -> Result<DiscreteNetwork, FaultTreeError> {
    let n_states = 1usize << tree.n_basic();
    check_belief(belief, n_states)?;
    let mut net = DiscreteNetwork::new();
    net.add(Variable::new(STATE_NODE, n_states), &[], belief.to_vec())?;
    let bit_of: HashMap<usize, usize> = tree
        .basic_events()
        .enumerate()
        .map(|(k, b)| (tree.node_index(&b.id).unwrap(), k))
        .collect();
    compile(
        tree,
        |i, _| {
            let k = bit_of[&i];
            Ok((0..n_states)
                .flat_map(|h| if h >> k & 1 == 1 { [0.0, 1.0] } else { [1.0, 0.0] })
                .collect())
        },
        Some(net),
    )
}

fn compile(
    tree: &FaultTree,
    basic_table: impl Fn(usize, &str) -> Result<Vec<f64>, FaultTreeError>,
    base: Option<DiscreteNetwork>,
) -> Result<DiscreteNetwork, FaultTreeError> {
    let seeded = base.is_some();
    let mut net = base.unwrap_or_default();
    for &i in tree.topological_indices() {
        let node = &tree.nodes()[i];
        match node.kind {
            NodeKind::Basic => {
                let table = basic_table(i, &node.id)?;
                let parents: &[&str] = if seeded { &[STATE_NODE] } else { &[] };
                net.add(Variable::binary(&node.id), parents, table)?;
            }
            kind => {
                let parents: Vec<&str> = node.children.iter().map(String::as_str).collect();
                net.add(Variable::binary(&node.id), &parents, gate_cpd(kind, parents.len()))?;
            }
        }
    }
    Ok(net)
}

fn check_belief(belief: &[f64], n_states: usize) -> Result<(), FaultTreeError> {
    if belief.len() != n_states {
        return Err(FaultTreeError::Belief(format!(
            "belief has {} entries, expected {n_states}",
            belief.len()
        )));
    }
    if belief.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(FaultTreeError::Belief("belief entries must be finite and non-negative".into()));
    }
    let total: f64 = belief.iter().sum();
    if (total - 1.0).abs() > BELIEF_TOLERANCE {
        return Err(FaultTreeError::Belief(format!("belief sums to {total}")));
    }
    Ok(())
}

/// `P(top = 1)` for independent basic events.
///
/// Priors in `priors` override those stored in the tree; every basic event
/// must end up with one.
pub fn top_event_probability(tree: &FaultTree, priors: &HashMap<String, f64>) -> Result<f64, FaultTreeError> {
    for (id, &p) in priors {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(FaultTreeError::PriorOutOfRange { id: id.clone(), value: p });
        }
        match tree.node(id) {
            Some(n) if n.kind == NodeKind::Basic => {}
            _ => return Err(FaultTreeError::NotBasic(id.clone())),
        }
    }
    let net = compile(
        tree,
        |i, id| {
            let p = priors
                .get(id)
                .copied()
                .or(tree.nodes()[i].prior)
                .ok_or_else(|| FaultTreeError::MissingPrior(id.to_string()))?;
            Ok(vec![1.0 - p, p])
        },
        None,
    )?;
    Ok(pgm::probability(&net, &tree.top().id, 1, &[])?)
}

/// `P(node = 1)` for every node, given a distribution over the joint
/// basic-event state (bit `k` = `k`-th basic event).
pub fn marginals_given_belief(tree: &FaultTree, belief: &[f64]) -> Result<BTreeMap<String, f64>, FaultTreeError> {
    let net = compile_with_state_node(tree, belief)?;
    tree.nodes()
        .iter()
        .map(|n| Ok((n.id.clone(), pgm::probability(&net, &n.id, 1, &[])?)))
        .collect()
}

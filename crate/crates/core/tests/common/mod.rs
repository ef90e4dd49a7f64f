//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use riskgraph::faulttree::{FaultTree, FtNode, HealthState, NodeKind, N_STATES};
use riskgraph::pgm::{DiscreteNetwork, Variable};
use riskgraph::transition::LoadGrid;
use riskgraph::truss::{Assembly, LoadCase, TrussModel};

/// A random binary network kept alongside its raw tables so the oracle
/// never goes through the factor code.
pub struct RandomNet {
    pub net: DiscreteNetwork,
    pub names: Vec<String>,
    /// parent indices, earlier nodes only
    pub parents: Vec<Vec<usize>>,
    /// `P(x = 1 | parents)` per parent configuration, first parent most significant
    pub p_on: Vec<Vec<f64>>,
}

pub fn random_network(rng: &mut impl Rng, max_nodes: usize) -> RandomNet {
    let n = rng.random_range(1..=max_nodes);
    let mut net = DiscreteNetwork::new();
    let mut names: Vec<String> = Vec::new();
    let mut parents = Vec::new();
    let mut p_on = Vec::new();
    for i in 0..n {
        let name = format!("x{i}");
        let mut pa: Vec<usize> = Vec::new();
        for j in 0..i {
            if rng.random_bool(0.4) {
                pa.push(j);
            }
        }
        pa.shuffle(rng);
        pa.truncate(3);
        let rows: Vec<f64> = (0..1usize << pa.len())
            .map(|_| if rng.random_bool(0.1) { rng.random_range(0..2) as f64 } else { rng.random() })
            .collect();
        let table: Vec<f64> = rows.iter().flat_map(|&p| [1.0 - p, p]).collect();
        let pa_names: Vec<&str> = pa.iter().map(|&j: &usize| names[j].as_str()).collect();
        net.add(Variable::binary(&name), &pa_names, table).unwrap();
        names.push(name);
        parents.push(pa);
        p_on.push(rows);
    }
    RandomNet { net, names, parents, p_on }
}

impl RandomNet {
    pub fn joint(&self, assignment: usize) -> f64 {
        let bit = |i: usize| (assignment >> i) & 1;
        (0..self.names.len())
            .map(|i| {
                let config = self.parents[i].iter().fold(0, |acc, &j| (acc << 1) | bit(j));
                let p = self.p_on[i][config];
                if bit(i) == 1 {
                    p
                } else {
                    1.0 - p
                }
            })
            .product()
    }

    /// `P(var | evidence)` by summing the full joint; `None` when the
    /// evidence has probability zero.
    pub fn marginal(&self, var: usize, evidence: &[(usize, usize)]) -> Option<[f64; 2]> {
        let mut m = [0.0; 2];
        for a in 0..1usize << self.names.len() {
            if evidence.iter().all(|&(j, s)| (a >> j) & 1 == s) {
                m[(a >> var) & 1] += self.joint(a);
            }
        }
        let z = m[0] + m[1];
        (z > 0.0).then(|| [m[0] / z, m[1] / z])
    }
}

/// Random AND/OR tree over `2..=max_basic` basic events, some shared
/// between gates, with random priors.
pub fn random_fault_tree(rng: &mut impl Rng, max_basic: usize) -> (FaultTree, HashMap<String, f64>) {
    let n_basic = rng.random_range(2..=max_basic);
    let mut nodes: Vec<FtNode> = (0..n_basic).map(|i| FtNode::basic(format!("b{i}"))).collect();
    let priors: HashMap<String, f64> = (0..n_basic).map(|i| (format!("b{i}"), rng.random())).collect();
    let mut pool: Vec<String> = nodes.iter().map(|n| n.id.clone()).collect();
    let mut g = 0;
    loop {
        pool.shuffle(rng);
        let take = rng.random_range(2..=3).min(pool.len());
        if pool.len() == 1 && g > 0 {
            break;
        }
        let mut children: Vec<String> = pool.drain(..take).collect();
        // occasionally reuse a basic event already consumed elsewhere
        if rng.random_bool(0.3) {
            let extra = format!("b{}", rng.random_range(0..n_basic));
            if !children.contains(&extra) {
                children.push(extra);
            }
        }
        let kind = if rng.random_bool(0.5) { NodeKind::And } else { NodeKind::Or };
        let id = format!("g{g}");
        g += 1;
        let refs: Vec<&str> = children.iter().map(String::as_str).collect();
        nodes.push(FtNode::gate(id.clone(), kind, &refs));
        pool.push(id);
    }
    let top = pool.pop().unwrap();
    let tree = FaultTree::new(nodes.clone(), &top).unwrap_or_else(|e| panic!("{e}: {nodes:?}"));
    (tree, priors)
}

fn eval(nodes: &HashMap<&str, &FtNode>, id: &str, value: &HashMap<&str, bool>) -> bool {
    let n = nodes[id];
    match n.kind {
        NodeKind::Basic => value[id],
        NodeKind::And => n.children.iter().all(|c| eval(nodes, c, value)),
        NodeKind::Or => n.children.iter().any(|c| eval(nodes, c, value)),
    }
}

/// Top-event probability by enumerating every basic-event assignment.
pub fn boolean_top_probability(tree: &FaultTree, priors: &HashMap<String, f64>) -> f64 {
    let by_id: HashMap<&str, &FtNode> = tree.nodes().iter().map(|n| (n.id.as_str(), n)).collect();
    let basics: Vec<&str> = tree.nodes().iter().filter(|n| n.kind == NodeKind::Basic).map(|n| n.id.as_str()).collect();
    let mut total = 0.0;
    for a in 0..1usize << basics.len() {
        let mut value = HashMap::new();
        let mut weight = 1.0;
        for (k, id) in basics.iter().enumerate() {
            let on = (a >> k) & 1 == 1;
            let p = priors[*id];
            weight *= if on { p } else { 1.0 - p };
            value.insert(*id, on);
        }
        if eval(&by_id, &tree.top().id, &value) {
            total += weight;
        }
    }
    total
}

/// Next-state counts for every row from one direct solve per load case,
/// tallied as they are produced.
pub fn tally_transition_counts(model: &TrussModel, grid: &LoadGrid) -> Vec<Vec<u32>> {
    let positions: Vec<usize> = model
        .cross_members
        .iter()
        .map(|id| model.members.iter().position(|m| m.id == *id).unwrap())
        .collect();
    let mut rows = vec![vec![0u32; N_STATES]; N_STATES];
    for (h, row) in rows.iter_mut().enumerate() {
        let health = HealthState::from_decimal(h as u8);
        let asm = Assembly::new(model, health).unwrap();
        for location in 1..=grid.n_locations {
            for k in 1..=grid.n_increments {
                let load = LoadCase { location, magnitude: grid.magnitude(k), preload: grid.preload };
                let sol = asm.solve(&load).unwrap();
                let mut next = h;
                for (i, &p) in positions.iter().enumerate() {
                    if sol.stresses[p].abs() >= model.yield_stress {
                        next |= 1 << i;
                    }
                }
                row[next] += 1;
            }
        }
    }
    rows
}

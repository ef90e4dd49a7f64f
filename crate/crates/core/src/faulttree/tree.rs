use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::FaultTreeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Basic,
    And,
    Or,
}

/// One event of a fault tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtNode {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<String>,
    /// Prior failure probability; basic events only.
    #[serde(default, rename = "prob", skip_serializing_if = "Option::is_none")]
    pub prior: Option<f64>,
}

impl FtNode {
    pub fn basic(id: impl Into<String>) -> Self {
        Self { id: id.into(), kind: NodeKind::Basic, children: Vec::new(), prior: None }
    }

    pub fn gate(id: impl Into<String>, kind: NodeKind, children: &[&str]) -> Self {
        Self {
            id: id.into(),
            kind,
            children: children.iter().map(|c| c.to_string()).collect(),
            prior: None,
        }
    }

    pub fn with_prior(mut self, p: f64) -> Self {
        self.prior = Some(p);
        self
    }
}

/// On-disk layout of a fault-tree document.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    top: String,
    nodes: Vec<FtNode>,
}

/// A validated AND/OR fault tree.
///
/// Shared subtrees are allowed (a node may be the child of several gates);
/// cycles, dangling references and nodes unreachable from the top event
/// are rejected. Basic events are kept in document order, which also fixes
/// the bit order used for joint state indices: bit `k` of a state index is
/// the `k`-th basic event.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultTree {
    nodes: Vec<FtNode>,
    index: HashMap<String, usize>,
    top: usize,
    /// Node indices with every child before its parents.
    order: Vec<usize>,
    basics: Vec<usize>,
}

impl FaultTree {
    pub fn new(nodes: Vec<FtNode>, top: &str) -> Result<Self, FaultTreeError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if n.id.is_empty() {
                return Err(FaultTreeError::invalid(i, "id", "empty id"));
            }
            if index.insert(n.id.clone(), i).is_some() {
                return Err(FaultTreeError::DuplicateId(n.id.clone()));
            }
        }
        for (i, n) in nodes.iter().enumerate() {
            match n.kind {
                NodeKind::Basic => {
                    if !n.children.is_empty() {
                        return Err(FaultTreeError::invalid(i, "children", "basic events have no children"));
                    }
                    if let Some(p) = n.prior {
                        if !(0.0..=1.0).contains(&p) {
                            return Err(FaultTreeError::PriorOutOfRange { id: n.id.clone(), value: p });
                        }
                    }
                }
                NodeKind::And | NodeKind::Or => {
                    if n.children.len() < 2 {
                        return Err(FaultTreeError::invalid(i, "children", "gates need at least two children"));
                    }
                    if n.prior.is_some() {
                        return Err(FaultTreeError::invalid(i, "prob", "only basic events carry a prior"));
                    }
                    let mut seen = HashSet::new();
                    for c in &n.children {
                        if !index.contains_key(c) {
                            return Err(FaultTreeError::DanglingChild { node: n.id.clone(), child: c.clone() });
                        }
                        if !seen.insert(c) {
                            return Err(FaultTreeError::invalid(i, "children", &format!("child `{c}` repeated")));
                        }
                    }
                }
            }
        }
        let top = *index
            .get(top)
            .ok_or_else(|| FaultTreeError::DanglingChild { node: "top".into(), child: top.into() })?;

        let order = topological_order(&nodes, &index, top)?;
        if order.len() != nodes.len() {
            let reached: HashSet<usize> = order.iter().copied().collect();
            let orphan = (0..nodes.len()).find(|i| !reached.contains(i)).unwrap();
            return Err(FaultTreeError::Unreachable(nodes[orphan].id.clone()));
        }
        let basics = (0..nodes.len()).filter(|&i| nodes[i].kind == NodeKind::Basic).collect();
        Ok(Self { nodes, index, top, order, basics })
    }

    /// Parses and validates a JSON fault-tree document.
    pub fn parse(text: &str) -> Result<Self, FaultTreeError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| FaultTreeError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::new(doc.nodes, &doc.top)
    }

    pub fn to_json(&self) -> String {
        let doc = Document { top: self.top().id.clone(), nodes: self.nodes.clone() };
        serde_json::to_string_pretty(&doc).expect("fault tree serialises")
    }

    pub fn top(&self) -> &FtNode {
        &self.nodes[self.top]
    }

    pub fn nodes(&self) -> &[FtNode] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&FtNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub(crate) fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Node ids with every child listed before its parents.
    pub fn topological_ids(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(|&i| self.nodes[i].id.as_str())
    }

    pub(crate) fn topological_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn basic_events(&self) -> impl Iterator<Item = &FtNode> {
        self.basics.iter().map(|&i| &self.nodes[i])
    }

    pub fn n_basic(&self) -> usize {
        self.basics.len()
    }

    /// Truth value of the top event under a complete basic-event assignment.
    pub fn eval_boolean(&self, assignment: &HashMap<String, bool>) -> Result<bool, FaultTreeError> {
        let mut state = 0u64;
        for (k, &i) in self.basics.iter().enumerate() {
            let id = &self.nodes[i].id;
            match assignment.get(id) {
                Some(true) => state |= 1 << k,
                Some(false) => {}
                None => return Err(FaultTreeError::MissingAssignment(id.clone())),
            }
        }
        Ok(self.eval_all(state)[self.top])
    }

    /// Truth value of every node (indexed like [`FaultTree::nodes`]) with
    /// basic event `k` set to bit `k` of `state`.
    pub fn eval_all(&self, state: u64) -> Vec<bool> {
        let mut value = vec![false; self.nodes.len()];
        for (k, &i) in self.basics.iter().enumerate() {
            value[i] = state >> k & 1 == 1;
        }
        for &i in &self.order {
            let n = &self.nodes[i];
            let mut children = n.children.iter().map(|c| value[self.index[c]]);
            value[i] = match n.kind {
                NodeKind::Basic => value[i],
                NodeKind::And => children.all(|b| b),
                NodeKind::Or => children.any(|b| b),
            };
        }
        value
    }

    pub fn eval_top(&self, state: u64) -> bool {
        self.eval_all(state)[self.top]
    }
}

/// Depth-first post-order from `top`; detects cycles.
fn topological_order(
    nodes: &[FtNode],
    index: &HashMap<String, usize>,
    top: usize,
) -> Result<Vec<usize>, FaultTreeError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    // explicit stack of (node, next child position)
    let mut stack = vec![(top, 0usize)];
    mark[top] = Mark::Open;
    while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
        if let Some(child) = nodes[node].children.get(*pos) {
            *pos += 1;
            let c = index[child];
            match mark[c] {
                Mark::New => {
                    mark[c] = Mark::Open;
                    stack.push((c, 0));
                }
                Mark::Open => return Err(FaultTreeError::Cycle(nodes[c].id.clone())),
                Mark::Done => {}
            }
        } else {
            mark[node] = Mark::Done;
            order.push(node);
            stack.pop();
        }
    }
    Ok(order)
}

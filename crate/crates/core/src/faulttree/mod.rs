//! Fault trees: parsing, Boolean evaluation, and compilation to Bayesian
//! networks, plus the health-state code for the four-bay truss.
//!
//! # Document format
//!
//! A fault tree is a JSON object with exactly two fields:
//!
//! ```json
//! {
//!   "top": "F_T",
//!   "nodes": [
//!     { "id": "hm9", "kind": "basic", "prob": 0.01 },
//!     { "id": "hm13", "kind": "basic" },
//!     { "id": "hb1", "kind": "and", "children": ["hm9", "hm13"] }
//!   ]
//! }
//! ```
//!
//! `kind` is one of `basic`, `and`, `or`. Gates list at least two
//! `children`; basic events have none and may carry an optional `prob`.
//! Unknown fields are rejected.

mod compile;
mod health;
mod tree;

pub use compile::{
    compile_to_bn, compile_with_state_node, gate_cpd, marginals_given_belief, top_event_probability,
    BELIEF_TOLERANCE, STATE_NODE,
};
pub use health::{HealthState, FIRST_CROSS_MEMBER, N_CROSS_MEMBERS, N_STATES};
pub use tree::{FaultTree, FtNode, NodeKind};

use thiserror::Error;

use crate::pgm::PgmError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaultTreeError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("nodes[{index}].{field}: {message}")]
    Invalid { index: usize, field: &'static str, message: String },
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("node `{node}` references missing child `{child}`")]
    DanglingChild { node: String, child: String },
    #[error("cycle through node `{0}`")]
    Cycle(String),
    #[error("node `{0}` is not reachable from the top event")]
    Unreachable(String),
    #[error("prior {value} for `{id}` is outside [0, 1]")]
    PriorOutOfRange { id: String, value: f64 },
    #[error("no prior given for basic event `{0}`")]
    MissingPrior(String),
    #[error("`{0}` is not a basic event of the tree")]
    NotBasic(String),
    #[error("assignment does not cover basic event `{0}`")]
    MissingAssignment(String),
    #[error("invalid belief: {0}")]
    Belief(String),
    #[error(transparent)]
    Network(#[from] PgmError),
}

impl FaultTreeError {
    fn invalid(index: usize, field: &'static str, message: &str) -> Self {
        Self::Invalid { index, field, message: message.to_string() }
    }
}

/// Id of the top event in [`truss_fault_tree`].
pub const TRUSS_TOP: &str = "F_T";

/// Id of the basic event for cross-member `member` (9..=16).
pub fn member_event_id(member: usize) -> String {
    format!("hm{member}")
}

/// Id of the AND gate for bay `bay` (1..=4).
pub fn bay_event_id(bay: usize) -> String {
    format!("hb{bay}")
}

/// Truss collapse: the structure fails if any bay fails, and a bay fails
/// when both of its cross-members have failed. Bay `j` owns members
/// `m_{8+j}` and `m_{12+j}`. Basic events are listed `hm9..hm16` so that
/// joint state indices coincide with [`HealthState`] decimals.
pub fn truss_fault_tree() -> FaultTree {
    let mut nodes: Vec<FtNode> = (9..=16).map(|m| FtNode::basic(member_event_id(m))).collect();
    for bay in 1..=4 {
        let a = member_event_id(8 + bay);
        let b = member_event_id(12 + bay);
        nodes.push(FtNode::gate(bay_event_id(bay), NodeKind::And, &[&a, &b]));
    }
    let bays: Vec<String> = (1..=4).map(bay_event_id).collect();
    let bay_refs: Vec<&str> = bays.iter().map(String::as_str).collect();
    nodes.push(FtNode::gate(TRUSS_TOP, NodeKind::Or, &bay_refs));
    FaultTree::new(nodes, TRUSS_TOP).expect("truss fault tree is valid")
}

/// `F(H)` for all 256 health states of the truss tree.
pub fn truss_failure_map(tree: &FaultTree) -> Vec<bool> {
    HealthState::all().map(|h| tree.eval_top(h.decimal() as u64)).collect()
}

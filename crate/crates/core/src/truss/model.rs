use serde::{Deserialize, Serialize};

use super::TrussError;

/// Standard gravity used to turn kilograms into newtons.
pub const GRAVITY: f64 = 9.81;
/// Young's modulus of the aluminium members, Pa.
pub const ALUMINIUM_MODULUS: f64 = 70e9;
/// Yield stress of the aluminium members, Pa.
pub const ALUMINIUM_YIELD: f64 = 300e6;
/// Member cross-sectional area, m².
pub const MEMBER_AREA: f64 = 177e-6;
/// Modulus assigned to a removed (failed) cross-member, Pa.
pub const FAILED_MODULUS: f64 = 1e6;
/// Bay width and truss height, m.
pub const BAY: f64 = 0.25;
/// Mass hung at the preload point in every experiment, kg.
pub const PRELOAD_MASS: f64 = 5.0;

/// A two-force member between two nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    /// 1-based member number (`m1`, `m2`, ...).
    pub id: usize,
    pub start: usize,
    pub end: usize,
    /// Cross-sectional area, m².
    pub area: f64,
    /// Young's modulus when intact, Pa.
    pub youngs_modulus: f64,
}

/// A pin-jointed planar truss with the annotations the case study needs:
/// which members are instrumented, which are removable, and where loads go.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrussModel {
    /// Node coordinates, m.
    pub nodes: Vec<[f64; 2]>,
    pub members: Vec<Member>,
    /// Fully pinned nodes (both DOFs fixed).
    pub supports: Vec<usize>,
    /// Member ids whose strains form the feature vector, in output order.
    pub measured_members: Vec<usize>,
    /// Member ids of the removable cross-members; position `i` is health bit `i + 1`.
    pub cross_members: Vec<usize>,
    /// Nodes receiving the variable load; position `i` is load location `i + 1`.
    pub load_points: Vec<usize>,
    /// Node carrying the preload.
    pub preload_point: usize,
    /// Yield stress, Pa.
    pub yield_stress: f64,
    /// Modulus of a failed cross-member, Pa.
    pub failed_modulus: f64,
    /// m/s².
    pub gravity: f64,
}

/// Node index of the bottom chord node at `x = col * 0.25`.
pub const fn bottom(col: usize) -> usize {
    col
}

/// Node index of the top chord node at `x = col * 0.25`.
pub const fn top(col: usize) -> usize {
    5 + col
}

/// The four-bay, 1 m x 0.25 m aluminium truss.
///
/// Nodes `0..5` run along the bottom chord and `5..10` along the top, left
/// to right; the two left-end nodes are pinned. Members:
///
/// | ids      | role                                            |
/// |----------|-------------------------------------------------|
/// | m1–m4    | bottom chords, bays 1–4                         |
/// | m5–m8    | top chords, bays 1–4                            |
/// | m9–m12   | `/` diagonals (bottom-left to top-right), bays 1–4 |
/// | m13–m16  | `\` diagonals (top-left to bottom-right), bays 1–4 |
/// | m17–m20  | verticals at x = 0.25, 0.5, 0.75, 1.0           |
///
/// Load locations 1–4 are the free bottom nodes and 5–8 the free top
/// nodes, left to right. The preload hangs from the top-right node.
pub fn build_four_bay_truss() -> TrussModel {
    let mut nodes = Vec::with_capacity(10);
    for y in [0.0, BAY] {
        for col in 0..5 {
            nodes.push([col as f64 * BAY, y]);
        }
    }
    let mut ends = Vec::with_capacity(20);
    ends.extend((0..4).map(|b| (bottom(b), bottom(b + 1))));
    ends.extend((0..4).map(|b| (top(b), top(b + 1))));
    ends.extend((0..4).map(|b| (bottom(b), top(b + 1))));
    ends.extend((0..4).map(|b| (top(b), bottom(b + 1))));
    ends.extend((1..5).map(|c| (bottom(c), top(c))));
    let members = ends
        .into_iter()
        .enumerate()
        .map(|(i, (start, end))| Member {
            id: i + 1,
            start,
            end,
            area: MEMBER_AREA,
            youngs_modulus: ALUMINIUM_MODULUS,
        })
        .collect();

    TrussModel {
        nodes,
        members,
        supports: vec![bottom(0), top(0)],
        measured_members: (1..=8).chain(17..=20).collect(),
        cross_members: (9..=16).collect(),
        load_points: (1..5).map(bottom).chain((1..5).map(top)).collect(),
        preload_point: top(4),
        yield_stress: ALUMINIUM_YIELD,
        failed_modulus: FAILED_MODULUS,
        gravity: GRAVITY,
    }
}

impl TrussModel {
    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn n_free_dofs(&self) -> usize {
        self.n_dofs() - 2 * self.supports.len()
    }

    /// Free DOF indices in ascending order (node `n` owns DOFs `2n`, `2n+1`).
    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs()).filter(|d| !self.supports.contains(&(d / 2))).collect()
    }

    pub fn member(&self, id: usize) -> Option<&Member> {
        self.members.iter().find(|m| m.id == id)
    }

    pub(crate) fn member_position(&self, id: usize) -> Option<usize> {
        self.members.iter().position(|m| m.id == id)
    }

    pub fn length(&self, m: &Member) -> f64 {
        let [xa, ya] = self.nodes[m.start];
        let [xb, yb] = self.nodes[m.end];
        (xb - xa).hypot(yb - ya)
    }

    /// Member ids belonging to bay `bay` (1-based): its two cross-members.
    pub fn bay_cross_members(&self, bay: usize) -> [usize; 2] {
        let half = self.cross_members.len() / 2;
        [self.cross_members[bay - 1], self.cross_members[half + bay - 1]]
    }

    pub fn validate(&self) -> Result<(), TrussError> {
        let n = self.nodes.len();
        let bad = |msg: String| Err(TrussError::Model(msg));
        if self.nodes.iter().flatten().any(|c| !c.is_finite()) {
            return bad("node coordinates must be finite".into());
        }
        for m in &self.members {
            if m.start >= n || m.end >= n || m.start == m.end {
                return bad(format!("member m{} has invalid end nodes", m.id));
            }
            if !(m.area > 0.0 && m.youngs_modulus > 0.0) {
                return bad(format!("member m{} needs positive area and modulus", m.id));
            }
            if self.length(m) <= 0.0 {
                return bad(format!("member m{} has zero length", m.id));
            }
        }
        for (i, m) in self.members.iter().enumerate() {
            if self.members[..i].iter().any(|o| o.id == m.id) {
                return bad(format!("member id m{} repeated", m.id));
            }
        }
        if self.supports.iter().any(|&s| s >= n) {
            return bad("support node out of range".into());
        }
        for id in self.measured_members.iter().chain(&self.cross_members) {
            if self.member(*id).is_none() {
                return bad(format!("annotation references unknown member m{id}"));
            }
        }
        if !self.cross_members.len().is_multiple_of(2) {
            return bad("cross-members must pair up into bays".into());
        }
        if self.load_points.iter().chain([&self.preload_point]).any(|&p| p >= n) {
            return bad("load point out of range".into());
        }
        if !(self.yield_stress > 0.0 && self.failed_modulus > 0.0 && self.gravity > 0.0) {
            return bad("yield stress, failed modulus and gravity must be positive".into());
        }
        Ok(())
    }
}

/// Overrides for the four-bay truss, read from a TOML file.
///
/// Every key is optional; omitted keys keep the built-in value. Node and
/// load-point indices are 0-based node numbers of [`build_four_bay_truss`].
///
/// ```toml
/// nodes = [[0.0, 0.0], [0.25, 0.0], ...]   # 10 coordinates, m
/// supports = [0, 5]
/// load_points = [1, 2, 3, 4, 6, 7, 8, 9]
/// preload_point = 9
/// youngs_modulus = 70e9                      # Pa
/// area = 177e-6                              # m²
/// yield_stress = 300e6                       # Pa
/// failed_modulus = 1e6                       # Pa
/// ```
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrussConfig {
    pub nodes: Option<Vec<[f64; 2]>>,
    pub supports: Option<Vec<usize>>,
    pub load_points: Option<Vec<usize>>,
    pub preload_point: Option<usize>,
    pub youngs_modulus: Option<f64>,
    pub area: Option<f64>,
    pub yield_stress: Option<f64>,
    pub failed_modulus: Option<f64>,
}

impl TrussConfig {
    pub fn from_toml(text: &str) -> Result<Self, TrussError> {
        toml::from_str(text).map_err(|e| TrussError::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<TrussModel, TrussError> {
        let mut model = build_four_bay_truss();
        if let Some(nodes) = &self.nodes {
            if nodes.len() != model.nodes.len() {
                return Err(TrussError::Config(format!(
                    "expected {} node coordinates, got {}",
                    model.nodes.len(),
                    nodes.len()
                )));
            }
            model.nodes = nodes.clone();
        }
        if let Some(s) = &self.supports {
            model.supports = s.clone();
        }
        if let Some(l) = &self.load_points {
            if l.len() != model.load_points.len() {
                return Err(TrussError::Config(format!(
                    "expected {} load points, got {}",
                    model.load_points.len(),
                    l.len()
                )));
            }
            model.load_points = l.clone();
        }
        if let Some(p) = self.preload_point {
            model.preload_point = p;
        }
        for m in &mut model.members {
            if let Some(e) = self.youngs_modulus {
                m.youngs_modulus = e;
            }
            if let Some(a) = self.area {
                m.area = a;
            }
        }
        if let Some(y) = self.yield_stress {
            model.yield_stress = y;
        }
        if let Some(e) = self.failed_modulus {
            model.failed_modulus = e;
        }
        model.validate()?;
        Ok(model)
    }
}

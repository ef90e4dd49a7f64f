//! Direct stiffness method for pin-jointed planar trusses.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{TrussError, TrussModel, PRELOAD_MASS};
use crate::faulttree::HealthState;

/// A vertical point mass at one of the model's load points, plus the
/// preload mass at the preload point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadCase {
    /// Load location, 1-based index into [`TrussModel::load_points`].
    pub location: usize,
    /// kg
    pub magnitude: f64,
    /// kg
    pub preload: f64,
}

impl LoadCase {
    pub fn new(location: usize, magnitude: f64) -> Self {
        Self { location, magnitude, preload: PRELOAD_MASS }
    }

    pub fn without_preload(location: usize, magnitude: f64) -> Self {
        Self { location, magnitude, preload: 0.0 }
    }

    pub fn validate(&self, model: &TrussModel) -> Result<(), TrussError> {
        if !(1..=model.load_points.len()).contains(&self.location) {
            return Err(TrussError::Load(format!("location {} out of range", self.location)));
        }
        if !(self.magnitude >= 0.0 && self.magnitude.is_finite()) {
            return Err(TrussError::Load(format!("magnitude {} kg must be >= 0", self.magnitude)));
        }
        if !(self.preload >= 0.0 && self.preload.is_finite()) {
            return Err(TrussError::Load(format!("preload {} kg must be >= 0", self.preload)));
        }
        Ok(())
    }

    /// Global nodal force vector, N (two entries per node, y up).
    pub fn forces(&self, model: &TrussModel) -> Vec<f64> {
        let mut f = vec![0.0; model.n_dofs()];
        let node = model.load_points[self.location - 1];
        f[2 * node + 1] -= self.magnitude * model.gravity;
        f[2 * model.preload_point + 1] -= self.preload * model.gravity;
        f
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StaticsSolution {
    /// Displacement of every DOF (zero at supports), m.
    pub displacements: Vec<f64>,
    /// Axial strain per member, in model member order.
    pub strains: Vec<f64>,
    /// Axial stress per member, Pa; positive in tension.
    pub stresses: Vec<f64>,
    /// Reaction force at each support DOF, N, ordered as the supports.
    pub reactions: Vec<f64>,
    /// Applied nodal forces, N.
    pub applied: Vec<f64>,
}

impl StaticsSolution {
    /// `|Σ reactions + Σ applied|` over both axes, relative to the applied load norm.
    pub fn equilibrium_residual(&self) -> f64 {
        let mut sum = [0.0f64; 2];
        for (i, f) in self.applied.iter().enumerate() {
            sum[i % 2] += f;
        }
        for (i, r) in self.reactions.iter().enumerate() {
            sum[i % 2] += r;
        }
        let scale = self.applied.iter().map(|f| f * f).sum::<f64>().sqrt();
        let residual = sum[0].hypot(sum[1]);
        if scale == 0.0 {
            residual
        } else {
            residual / scale
        }
    }
}

/// Per-member modulus for a health state: failed cross-members get the
/// model's failed modulus.
pub fn member_moduli(model: &TrussModel, health: HealthState) -> Vec<f64> {
    let mut e: Vec<f64> = model.members.iter().map(|m| m.youngs_modulus).collect();
    for (i, id) in model.cross_members.iter().enumerate() {
        if health.bit(i + 1) {
            let pos = model.member_position(*id).expect("validated cross-member");
            e[pos] = model.failed_modulus;
        }
    }
    e
}

/// The reduced stiffness matrix of one health state, factorised once so
/// that many load vectors can be solved against it.
pub struct Assembly<'m> {
    model: &'m TrussModel,
    moduli: Vec<f64>,
    stiffness: DMatrix<f64>,
    factor: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    free: Vec<usize>,
}

impl<'m> Assembly<'m> {
    pub fn new(model: &'m TrussModel, health: HealthState) -> Result<Self, TrussError> {
        let moduli = member_moduli(model, health);
        let stiffness = global_stiffness(model, &moduli);
        let free = model.free_dofs();
        let reduced = stiffness.select_rows(&free).select_columns(&free);
        let factor = match nalgebra::Cholesky::new(reduced.clone()) {
            Some(c) => c,
            None => return Err(singular(&reduced)),
        };
        // a Cholesky factor with a collapsed pivot is still singular in practice
        let diag = factor.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
        if lo.is_nan() || lo <= 0.0 || (hi / lo).powi(2) > 1e14 {
            return Err(singular(&reduced));
        }
        Ok(Self { model, moduli, stiffness, factor, free })
    }

    pub fn model(&self) -> &TrussModel {
        self.model
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    /// Solves for arbitrary nodal forces (N, two per node).
    pub fn solve_forces(&self, forces: &[f64]) -> StaticsSolution {
        let model = self.model;
        let rhs = DVector::from_iterator(self.free.len(), self.free.iter().map(|&d| forces[d]));
        let u_free = self.factor.solve(&rhs);
        let mut u = DVector::zeros(model.n_dofs());
        for (k, &d) in self.free.iter().enumerate() {
            u[d] = u_free[k];
        }

        let mut strains = Vec::with_capacity(model.members.len());
        let mut stresses = Vec::with_capacity(model.members.len());
        for (m, e) in model.members.iter().zip(&self.moduli) {
            let (c, s, len) = direction(model, m.start, m.end);
            let elong = c * (u[2 * m.end] - u[2 * m.start]) + s * (u[2 * m.end + 1] - u[2 * m.start + 1]);
            let strain = elong / len;
            strains.push(strain);
            stresses.push(e * strain);
        }

        let internal = &self.stiffness * &u;
        let reactions = model
            .supports
            .iter()
            .flat_map(|&n| [2 * n, 2 * n + 1])
            .map(|d| internal[d] - forces[d])
            .collect();

        StaticsSolution {
            displacements: u.iter().copied().collect(),
            strains,
            stresses,
            reactions,
            applied: forces.to_vec(),
        }
    }

    pub fn solve(&self, load: &LoadCase) -> Result<StaticsSolution, TrussError> {
        load.validate(self.model)?;
        Ok(self.solve_forces(&load.forces(self.model)))
    }
}

fn direction(model: &TrussModel, a: usize, b: usize) -> (f64, f64, f64) {
    let [xa, ya] = model.nodes[a];
    let [xb, yb] = model.nodes[b];
    let len = (xb - xa).hypot(yb - ya);
    ((xb - xa) / len, (yb - ya) / len, len)
}

fn global_stiffness(model: &TrussModel, moduli: &[f64]) -> DMatrix<f64> {
    let n = model.n_dofs();
    let mut k = DMatrix::zeros(n, n);
    for (m, e) in model.members.iter().zip(moduli) {
        let (c, s, len) = direction(model, m.start, m.end);
        let axial = e * m.area / len;
        let local = [c * c, c * s, c * s, s * s];
        let dofs = [2 * m.start, 2 * m.start + 1, 2 * m.end, 2 * m.end + 1];
        for (i, &di) in dofs.iter().enumerate() {
            for (j, &dj) in dofs.iter().enumerate() {
                let sign = if (i < 2) == (j < 2) { 1.0 } else { -1.0 };
                k[(di, dj)] += sign * axial * local[(i % 2) * 2 + j % 2];
            }
        }
    }
    k
}

fn singular(reduced: &DMatrix<f64>) -> TrussError {
    let sv = reduced.singular_values();
    let max = sv.max();
    let min = sv.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    TrussError::Singular { condition }
}

/// Solves one (health, load) pair from scratch.
pub fn solve_statics(model: &TrussModel, health: HealthState, load: &LoadCase) -> Result<StaticsSolution, TrussError> {
    Assembly::new(model, health)?.solve(load)
}

/// Strains of the measured members, microstrain, in
/// [`TrussModel::measured_members`] order.
pub fn measured_strains(model: &TrussModel, sol: &StaticsSolution) -> Vec<f64> {
    model
        .measured_members
        .iter()
        .map(|id| sol.strains[model.member_position(*id).expect("validated member")] * 1e6)
        .collect()
}

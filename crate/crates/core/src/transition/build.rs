//! Degradation model from load-case sweeps of the truss.
//!
//! For a health state `H` and load case `L`, the transition increment
//! `δH` flags every intact cross-member whose axial stress magnitude reaches
//! the yield stress. Over a grid of equally likely load cases,
//! `P(H' | H) = #{L : H | δH(H, L) = H'} / N`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{TransitionError, TransitionMatrix};
use crate::decision::Action;
use crate::faulttree::{HealthState, N_STATES};
use crate::truss::{solve_statics, Assembly, LoadCase, TrussModel, PRELOAD_MASS};

/// Bisection bracket for the maximum load, kg.
pub const WMAX_BRACKET: (f64, f64) = (1.0, 1e6);
/// Default target for `P(H_{t+1} != 0 | H_t = 0)`.
pub const DEFAULT_TARGET: f64 = 0.005;

/// Equally likely load cases: `n_increments` magnitudes
/// `w_max * k / n_increments` (`k = 1..=n_increments`) at each load location.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadGrid {
    /// kg
    pub w_max: f64,
    pub n_increments: usize,
    pub n_locations: usize,
    /// kg, present in every case
    pub preload: f64,
}

impl LoadGrid {
    pub fn new(w_max: f64) -> Self {
        Self { w_max, n_increments: 100, n_locations: 8, preload: PRELOAD_MASS }
    }

    pub fn for_model(model: &TrussModel, w_max: f64) -> Self {
        Self { n_locations: model.load_points.len(), ..Self::new(w_max) }
    }

    pub fn n_cases(&self) -> usize {
        self.n_increments * self.n_locations
    }

    /// Magnitude of increment `k`, kg.
    pub fn magnitude(&self, k: usize) -> f64 {
        self.w_max * k as f64 / self.n_increments as f64
    }

    /// Every load case, location-major.
    pub fn cases(&self) -> impl Iterator<Item = LoadCase> + '_ {
        (1..=self.n_locations).flat_map(move |loc| {
            (1..=self.n_increments).map(move |k| LoadCase {
                location: loc,
                magnitude: self.magnitude(k),
                preload: self.preload,
            })
        })
    }

    pub fn validate(&self) -> Result<(), TransitionError> {
        if !(self.w_max > 0.0 && self.w_max.is_finite()) || self.n_increments == 0 || self.n_locations == 0 {
            return Err(TransitionError::Grid(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Yield-exceedance increment from a single direct solve.
pub fn delta_health(model: &TrussModel, health: HealthState, load: &LoadCase) -> Result<HealthState, TransitionError> {
    let sol = solve_statics(model, health, load)?;
    Ok(exceedance(model, health, |i| {
        let pos = model.members.iter().position(|m| m.id == model.cross_members[i]).unwrap();
        sol.stresses[pos]
    }))
}

fn exceedance(model: &TrussModel, health: HealthState, stress: impl Fn(usize) -> f64) -> HealthState {
    let mut bits = [false; 8];
    for (i, bit) in bits.iter_mut().enumerate().take(model.cross_members.len()) {
        // a removed member cannot fail again
        *bit = !health.bit(i + 1) && stress(i).abs() >= model.yield_stress;
    }
    HealthState::from_bits(bits)
}

/// Cross-member stresses of one health state as an affine function of the
/// load magnitude: `σ = preload_stress + magnitude * unit_stress[location]`.
#[derive(Clone, Debug)]
pub struct StressResponse {
    health: HealthState,
    yield_stress: f64,
    preload: Vec<f64>,
    /// Pa per kg, per load location.
    unit: Vec<Vec<f64>>,
}

impl StressResponse {
    pub fn new(model: &TrussModel, health: HealthState, preload: f64) -> Result<Self, TransitionError> {
        let asm = Assembly::new(model, health)?;
        let positions: Vec<usize> = model
            .cross_members
            .iter()
            .map(|id| model.members.iter().position(|m| m.id == *id).unwrap())
            .collect();
        let pick = |stresses: &[f64]| positions.iter().map(|&p| stresses[p]).collect::<Vec<_>>();
        let pre = asm.solve(&LoadCase { location: 1, magnitude: 0.0, preload })?;
        let unit = (1..=model.load_points.len())
            .map(|loc| Ok(pick(&asm.solve(&LoadCase::without_preload(loc, 1.0))?.stresses)))
            .collect::<Result<_, TransitionError>>()?;
        Ok(Self { health, yield_stress: model.yield_stress, preload: pick(&pre.stresses), unit })
    }

    pub fn stress(&self, location: usize, magnitude: f64) -> Vec<f64> {
        self.preload
            .iter()
            .zip(&self.unit[location - 1])
            .map(|(p, u)| p + magnitude * u)
            .collect()
    }

    pub fn delta(&self, location: usize, magnitude: f64) -> HealthState {
        let unit = &self.unit[location - 1];
        let mut bits = [false; 8];
        for (i, bit) in bits.iter_mut().enumerate().take(self.preload.len()) {
            *bit = !self.health.bit(i + 1) && (self.preload[i] + magnitude * unit[i]).abs() >= self.yield_stress;
        }
        HealthState::from_bits(bits)
    }

    /// Number of grid cases (at `w_max`) that change the state.
    pub fn damaging_cases(&self, grid: &LoadGrid) -> usize {
        (1..=grid.n_locations)
            .map(|loc| {
                (1..=grid.n_increments)
                    .filter(|&k| self.delta(loc, grid.magnitude(k)) != HealthState::UNDAMAGED)
                    .count()
            })
            .sum()
    }
}

/// Next-state counts for one row of the do-nothing matrix.
pub fn transition_counts(model: &TrussModel, health: HealthState, grid: &LoadGrid) -> Result<Vec<u32>, TransitionError> {
    let response = StressResponse::new(model, health, grid.preload)?;
    let mut counts = vec![0u32; N_STATES];
    for loc in 1..=grid.n_locations {
        for k in 1..=grid.n_increments {
            let next = health.union(response.delta(loc, grid.magnitude(k)));
            counts[next.index()] += 1;
        }
    }
    Ok(counts)
}

/// The do-nothing transition matrix over the load grid.
pub fn build_transition(model: &TrussModel, grid: &LoadGrid) -> Result<TransitionMatrix, TransitionError> {
    grid.validate()?;
    if grid.n_locations != model.load_points.len() {
        return Err(TransitionError::Grid(format!(
            "grid has {} locations, model has {}",
            grid.n_locations,
            model.load_points.len()
        )));
    }
    let rows: Vec<Vec<u32>> = (0..N_STATES)
        .into_par_iter()
        .map(|h| transition_counts(model, HealthState::from_decimal(h as u8), grid))
        .collect::<Result<_, _>>()?;
    let n = grid.n_cases() as f64;
    let entries = rows.into_iter().flatten().map(|c| c as f64 / n).collect();
    TransitionMatrix::new(Action::DoNothing, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// kg
    pub w_max: f64,
    pub target: f64,
    /// Cases out of [`LoadGrid::n_cases`] that damage the undamaged truss.
    pub damaging_cases: usize,
    pub n_cases: usize,
    pub probability: f64,
    /// Set when the target is not exactly achievable on the grid.
    pub warning: Option<String>,
}

/// Finds the smallest `w_max` for which the undamaged truss leaves the
/// undamaged state with probability `target` over the default load grid.
///
/// The probability is a step function of `w_max` with steps of `1 / N`;
/// the closest achievable count to `target * N` is chosen and the smallest
/// `w_max` reaching it is located by bisection on [`WMAX_BRACKET`].
pub fn calibrate_wmax(model: &TrussModel, target: f64) -> Result<Calibration, TransitionError> {
    if !(0.0..1.0).contains(&target) {
        return Err(TransitionError::Target(target));
    }
    let template = LoadGrid::for_model(model, 1.0);
    let n = template.n_cases();
    let response = StressResponse::new(model, HealthState::UNDAMAGED, template.preload)?;
    let count = |w: f64| response.damaging_cases(&LoadGrid { w_max: w, ..template });

    let (lo, hi) = WMAX_BRACKET;
    let wanted = (target * n as f64).round() as usize;
    let (c_lo, c_hi) = (count(lo), count(hi));
    let smallest_reaching = |c: usize| -> f64 {
        if c <= c_lo {
            return lo;
        }
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-12 * b {
            let mid = 0.5 * (a + b);
            if count(mid) >= c {
                b = mid;
            } else {
                a = mid;
            }
        }
        b
    };

    let (w_max, warning) = if wanted > c_hi {
        (hi, Some(format!("target {target} unreachable below {hi} kg; best is {c_hi}/{n}")))
    } else {
        let w = smallest_reaching(wanted);
        let got = count(w);
        if got == wanted {
            (w, None)
        } else {
            // the step jumped past the target; compare with the level just below
            let below = if w > lo { count(w * (1.0 - 1e-9)) } else { got };
            if wanted - below < got - wanted && below != got {
                let w2 = smallest_reaching(below);
                (w2, Some(format!("target {wanted}/{n} not achievable; using {below}/{n}")))
            } else {
                (w, Some(format!("target {wanted}/{n} not achievable; using {got}/{n}")))
            }
        }
    };
    let damaging = count(w_max);
    Ok(Calibration {
        w_max,
        target,
        damaging_cases: damaging,
        n_cases: n,
        probability: damaging as f64 / n as f64,
        warning,
    })
}

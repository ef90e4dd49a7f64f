//! Shared fixtures for the criterion benchmarks.

use riskgraph::faulttree::HealthState;
use riskgraph::transition::{calibrate_wmax, DEFAULT_TARGET};
use riskgraph::truss::{build_four_bay_truss, measured_strains, solve_statics, LoadCase, TrussModel};

/// The four-bay truss with its calibrated maximum load.
pub fn calibrated_truss() -> (TrussModel, f64) {
    let truss = build_four_bay_truss();
    let w_max = calibrate_wmax(&truss, DEFAULT_TARGET).expect("calibration").w_max;
    (truss, w_max)
}

/// Noise-free strain vectors for every classifier state, one load each.
pub fn strain_batch(truss: &TrussModel, load: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for h in HealthState::classifier_support() {
        for &loc in &truss.load_points {
            let sol = solve_statics(truss, h, &LoadCase::new(loc, load)).expect("solve");
            out.push(measured_strains(truss, &sol));
        }
    }
    out
}

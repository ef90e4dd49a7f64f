use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::faulttree::HealthState;
use crate::truss::{measured_strains, Assembly, LoadCase, TrussError, TrussModel};

/// One noisy strain record with its true health state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledSample {
    /// microstrain
    pub strains: Vec<f64>,
    pub health: HealthState,
    pub load: LoadCase,
    pub noise_seed: u64,
}

/// Noise-free measured strains for every (state, load, location), in that
/// nesting order.
pub fn clean_strains(
    model: &TrussModel,
    states: &[HealthState],
    loads: &[f64],
) -> Result<Vec<(HealthState, LoadCase, Vec<f64>)>, TrussError> {
    let per_state: Vec<Vec<_>> = states
        .par_iter()
        .map(|&h| {
            let asm = Assembly::new(model, h)?;
            let mut out = Vec::with_capacity(loads.len() * model.load_points.len());
            for &w in loads {
                for location in 1..=model.load_points.len() {
                    let load = LoadCase::new(location, w);
                    let sol = asm.solve(&load)?;
                    out.push((h, load, measured_strains(model, &sol)));
                }
            }
            Ok(out)
        })
        .collect::<Result<_, TrussError>>()?;
    Ok(per_state.into_iter().flatten().collect())
}

/// Every (state, load, location) solved with the preload, then `reps`
/// copies with independent zero-mean Gaussian noise of standard deviation
/// `noise_rms`. Each sample carries the seed of its own noise draw.
pub fn synthesize_dataset(
    model: &TrussModel,
    states: &[HealthState],
    loads: &[f64],
    reps: usize,
    noise_rms: f64,
    seed: u64,
) -> Result<Vec<LabelledSample>, TrussError> {
    if !(noise_rms.is_finite() && noise_rms >= 0.0) {
        return Err(TrussError::Load(format!("noise rms must be non-negative, got {noise_rms}")));
    }
    let clean = clean_strains(model, states, loads)?;
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_rms).expect("validated");
    let mut out = Vec::with_capacity(clean.len() * reps);
    for (health, load, strains) in clean {
        for _ in 0..reps {
            let noise_seed = seeds.next_u64();
            let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
            let strains = strains.iter().map(|e| e + noise.sample(&mut rng)).collect();
            out.push(LabelledSample { strains, health, load, noise_seed });
        }
    }
    Ok(out)
}

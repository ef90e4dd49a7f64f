use serde::{Deserialize, Serialize};

use super::{ClassifyError, Mlp, NoveltyDetector};
use crate::faulttree::{HealthState, N_CROSS_MEMBERS, N_STATES};

const SUM_TOLERANCE: f64 = 1e-9;

/// Distribution over the 256 health states, supported on the undamaged
/// state and the eight single failures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassifierBelief(Vec<f64>);

impl ClassifierBelief {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn get(&self, h: HealthState) -> f64 {
        self.0[h.index()]
    }
}

impl AsRef<[f64]> for ClassifierBelief {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `P(H=0) = p0`; the remaining mass is spread over the single failures
/// in proportion to the localiser output `loc` (index `i` is member bit `i+1`).
pub fn fuse_belief(p0: f64, loc: &[f64]) -> Result<ClassifierBelief, ClassifyError> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(ClassifyError::Probability(format!("p0 = {p0} outside [0, 1]")));
    }
    if loc.len() != N_CROSS_MEMBERS {
        return Err(ClassifyError::Shape { expected: N_CROSS_MEMBERS, got: loc.len() });
    }
    let total: f64 = loc.iter().sum();
    if loc.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(ClassifyError::Probability(format!("localiser output sums to {total}")));
    }
    let mut b = vec![0.0; N_STATES];
    b[0] = p0;
    for (i, p) in loc.iter().enumerate() {
        b[HealthState::single(i + 1).index()] = (1.0 - p0) * p;
    }
    Ok(ClassifierBelief(b))
}

/// Novelty detector and localiser applied together to one strain vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classifier {
    pub detector: NoveltyDetector,
    pub localiser: Mlp,
}

impl Classifier {
    pub fn belief(&self, strains: &[f64]) -> Result<ClassifierBelief, ClassifyError> {
        let p0 = self.detector.probability(strains)?;
        fuse_belief(p0, &self.localiser.forward(strains)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classifier serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifyError> {
        let c: Classifier = serde_json::from_str(text).map_err(|e| ClassifyError::Format(e.to_string()))?;
        c.localiser.validate()?;
        if c.detector.pca.n_features() != c.localiser.n_inputs() {
            return Err(ClassifyError::Format("detector and localiser disagree on input size".into()));
        }
        if c.localiser.n_outputs() != N_CROSS_MEMBERS {
            return Err(ClassifyError::Format(format!("localiser must have {N_CROSS_MEMBERS} outputs")));
        }
        Ok(c)
    }
}

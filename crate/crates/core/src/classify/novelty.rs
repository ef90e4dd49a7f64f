use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ClassifyError;

/// Probability of the undamaged state returned inside the `Z_LIMIT` band.
pub const CONFIDENCE_INSIDE: f64 = 0.997;
pub const Z_LIMIT: f64 = 3.0;
/// Components kept by the detector's projection. Only the first is used
/// for classification; the second is retained for plotting.
pub const NOVELTY_COMPONENTS: usize = 2;

/// Principal-component projection. `components` rows are orthonormal
/// directions in order of decreasing variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pca {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
}

impl Pca {
    pub fn fit(data: &[Vec<f64>], k: usize) -> Result<Self, ClassifyError> {
        let n = data.len();
        if n < 2 {
            return Err(ClassifyError::Fit(format!("need at least 2 samples, got {n}")));
        }
        let d = data[0].len();
        if d == 0 || k == 0 || k > d {
            return Err(ClassifyError::Fit(format!("cannot keep {k} components of {d} features")));
        }
        if let Some(row) = data.iter().find(|r| r.len() != d) {
            return Err(ClassifyError::Shape { expected: d, got: row.len() });
        }
        if data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ClassifyError::Fit("non-finite sample".into()));
        }
        let mut mean = vec![0.0; d];
        for row in data {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let centred = DMatrix::from_fn(n, d, |i, j| data[i][j] - mean[j]);
        let cov = centred.transpose() * &centred / (n - 1) as f64;
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let mut components = Vec::with_capacity(k);
        let mut variances = Vec::with_capacity(k);
        for &i in &order[..k] {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            // sign convention: the largest-magnitude entry is positive
            let pivot = v.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            components.push(v);
            variances.push(eig.eigenvalues[i].max(0.0));
        }
        if variances[0] <= 0.0 {
            return Err(ClassifyError::Fit("training data have zero variance".into()));
        }
        Ok(Self { mean, components, variances })
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
        if x.len() != self.mean.len() {
            return Err(ClassifyError::Shape { expected: self.mean.len(), got: x.len() });
        }
        let c = DVector::from_iterator(x.len(), x.iter().zip(&self.mean).map(|(v, m)| v - m));
        Ok(self.components.iter().map(|dir| DVector::from_column_slice(dir).dot(&c)).collect())
    }
}

/// Mass of the undamaged class for a PC1 score `z` standard deviations
/// from the training mean: `CONFIDENCE_INSIDE` on `|z| <= Z_LIMIT`, the
/// two-sided normal tail beyond.
pub fn novelty_tail(z: f64) -> f64 {
    let a = z.abs();
    if a <= Z_LIMIT {
        CONFIDENCE_INSIDE
    } else {
        2.0 * Normal::standard().cdf(-a)
    }
}

/// Gaussian model of the first principal component of undamaged strains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoveltyDetector {
    pub pca: Pca,
    pub mu: f64,
    pub sigma: f64,
}

impl NoveltyDetector {
    pub fn fit(undamaged: &[Vec<f64>]) -> Result<Self, ClassifyError> {
        let k = NOVELTY_COMPONENTS.min(undamaged.first().map_or(1, Vec::len)).max(1);
        let pca = Pca::fit(undamaged, k)?;
        let scores: Vec<f64> = undamaged.iter().map(|x| pca.project(x).map(|p| p[0])).collect::<Result<_, _>>()?;
        let (mu, sigma) = mean_and_sample_std(&scores);
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(ClassifyError::Fit("first principal component has zero spread".into()));
        }
        Ok(Self { pca, mu, sigma })
    }

    pub fn score(&self, x: &[f64]) -> Result<f64, ClassifyError> {
        Ok(self.pca.project(x)?[0])
    }

    pub fn z(&self, x: &[f64]) -> Result<f64, ClassifyError> {
        Ok((self.score(x)? - self.mu) / self.sigma)
    }

    /// `P(H = 0 | x)`.
    pub fn probability(&self, x: &[f64]) -> Result<f64, ClassifyError> {
        Ok(novelty_tail(self.z(x)?))
    }

    /// Hard decision: damaged when `x` falls outside the band.
    pub fn is_novel(&self, x: &[f64]) -> Result<bool, ClassifyError> {
        Ok(self.z(x)?.abs() > Z_LIMIT)
    }
}

pub(crate) fn mean_and_sample_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

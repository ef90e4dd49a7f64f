use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClassifyError;

/// Twelve strains in, hidden layers of 12, 12 and 8, one output per cross-member.
pub const LOCALISER_SIZES: [usize; 5] = [12, 12, 12, 8, 8];

const CHUNK: usize = 256;

/// Fully connected network with tanh hidden layers and a softmax output.
/// Inputs are z-scored with stored per-feature constants before the
/// first layer. Weights are row-major `out x in`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
}

impl Mlp {
    /// Weights and biases uniform in `±1/sqrt(fan_in)`.
    pub fn new(sizes: &[usize], seed: u64) -> Result<Self, ClassifyError> {
        let mut net = Self::zeros(sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for ((weights, biases), &fan_in) in net.weights.iter_mut().zip(&mut net.biases).zip(sizes) {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for w in weights.iter_mut().chain(biases.iter_mut()) {
                *w = rng.random_range(-bound..=bound);
            }
        }
        Ok(net)
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self, ClassifyError> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(ClassifyError::Fit(format!("invalid layer sizes {sizes:?}")));
        }
        let weights = sizes.windows(2).map(|w| vec![0.0; w[0] * w[1]]).collect();
        let biases = sizes[1..].iter().map(|&n| vec![0.0; n]).collect();
        Ok(Self {
            sizes: sizes.to_vec(),
            weights,
            biases,
            input_mean: vec![0.0; sizes[0]],
            input_std: vec![1.0; sizes[0]],
        })
    }

    pub fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn n_inputs(&self) -> usize {
        self.sizes[0]
    }

    pub fn n_outputs(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// Sets the input z-score constants from training inputs. Constant
    /// features keep unit scale.
    pub fn standardize_from(&mut self, inputs: &[Vec<f64>]) -> Result<(), ClassifyError> {
        let d = self.n_inputs();
        if inputs.len() < 2 {
            return Err(ClassifyError::Fit("need at least 2 samples to standardize".into()));
        }
        for x in inputs {
            self.check_input(x)?;
        }
        for j in 0..d {
            let col: Vec<f64> = inputs.iter().map(|x| x[j]).collect();
            let (m, s) = super::novelty::mean_and_sample_std(&col);
            self.input_mean[j] = m;
            self.input_std[j] = if s > 0.0 { s } else { 1.0 };
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// Layer by layer: weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), ClassifyError> {
        if params.len() != self.n_params() {
            return Err(ClassifyError::Shape { expected: self.n_params(), got: params.len() });
        }
        let mut rest = params;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            let (head, tail) = rest.split_at(w.len());
            w.copy_from_slice(head);
            let (head, tail) = tail.split_at(b.len());
            b.copy_from_slice(head);
            rest = tail;
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<(), ClassifyError> {
        if x.len() != self.n_inputs() {
            return Err(ClassifyError::Shape { expected: self.n_inputs(), got: x.len() });
        }
        Ok(())
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.input_mean).zip(&self.input_std).map(|((v, m), s)| (v - m) / s).collect()
    }

    /// Activations of every layer; the last entry holds the raw logits.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.sizes.len());
        acts.push(self.standardize(x));
        for l in 0..self.n_layers() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let a = &acts[l];
            let w = &self.weights[l];
            let mut z: Vec<f64> = (0..n_out)
                .map(|i| self.biases[l][i] + w[i * n_in..(i + 1) * n_in].iter().zip(a).map(|(w, a)| w * a).sum::<f64>())
                .collect();
            if l + 1 < self.n_layers() {
                z.iter_mut().for_each(|v| *v = v.tanh());
            }
            acts.push(z);
        }
        acts
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
        self.check_input(x)?;
        Ok(self.activations(x).pop().unwrap())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
        Ok(softmax(&self.logits(x)?))
    }

    /// Most probable class, 1-based.
    pub fn predict(&self, x: &[f64]) -> Result<usize, ClassifyError> {
        let p = self.forward(x)?;
        Ok(argmax(&p) + 1)
    }

    fn check_labels(&self, inputs: &[Vec<f64>], labels: &[usize]) -> Result<(), ClassifyError> {
        if inputs.len() != labels.len() {
            return Err(ClassifyError::Shape { expected: inputs.len(), got: labels.len() });
        }
        if inputs.is_empty() {
            return Err(ClassifyError::Training("empty dataset".into()));
        }
        let k = self.n_outputs();
        if let Some(&label) = labels.iter().find(|&&y| y == 0 || y > k) {
            return Err(ClassifyError::Label { label, classes: k });
        }
        inputs.iter().try_for_each(|x| self.check_input(x))
    }

    /// Mean cross-entropy for 1-based `labels`.
    pub fn loss(&self, inputs: &[Vec<f64>], labels: &[usize]) -> Result<f64, ClassifyError> {
        self.check_labels(inputs, labels)?;
        let total: f64 = inputs
            .par_chunks(CHUNK)
            .zip(labels.par_chunks(CHUNK))
            .map(|(xs, ys)| xs.iter().zip(ys).map(|(x, &y)| sample_loss(&self.activations(x), y)).sum::<f64>())
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        Ok(total / inputs.len() as f64)
    }

    /// Mean cross-entropy and its gradient with respect to [`Mlp::params`].
    pub fn loss_and_gradient(&self, inputs: &[Vec<f64>], labels: &[usize]) -> Result<(f64, Vec<f64>), ClassifyError> {
        self.check_labels(inputs, labels)?;
        let n_params = self.n_params();
        // fixed chunks reduced in order, so the sum does not depend on scheduling
        let partials: Vec<(f64, Vec<f64>)> = inputs
            .par_chunks(CHUNK)
            .zip(labels.par_chunks(CHUNK))
            .map(|(xs, ys)| {
                let mut grad = vec![0.0; n_params];
                let mut loss = 0.0;
                for (x, &y) in xs.iter().zip(ys) {
                    loss += self.backprop(x, y, &mut grad);
                }
                (loss, grad)
            })
            .collect();
        let mut loss = 0.0;
        let mut grad = vec![0.0; n_params];
        for (l, g) in partials {
            loss += l;
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
        let n = inputs.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        Ok((loss / n, grad))
    }

    fn backprop(&self, x: &[f64], label: usize, grad: &mut [f64]) -> f64 {
        let acts = self.activations(x);
        let loss = sample_loss(&acts, label);
        let mut delta = softmax(acts.last().unwrap());
        delta[label - 1] -= 1.0;

        let mut offsets = Vec::with_capacity(self.n_layers());
        let mut off = 0;
        for (w, b) in self.weights.iter().zip(&self.biases) {
            offsets.push(off);
            off += w.len() + b.len();
        }
        for l in (0..self.n_layers()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let a = &acts[l];
            let base = offsets[l];
            for i in 0..n_out {
                let row = &mut grad[base + i * n_in..base + (i + 1) * n_in];
                row.iter_mut().zip(a).for_each(|(g, a)| *g += delta[i] * a);
                grad[base + n_out * n_in + i] += delta[i];
            }
            if l > 0 {
                let w = &self.weights[l];
                delta = (0..n_in)
                    .map(|j| {
                        let back: f64 = (0..n_out).map(|i| w[i * n_in + j] * delta[i]).sum();
                        back * (1.0 - a[j] * a[j])
                    })
                    .collect();
            }
        }
        loss
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ClassifyError> {
        let net: Mlp = serde_json::from_str(text).map_err(|e| ClassifyError::Format(e.to_string()))?;
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<(), ClassifyError> {
        let reference = Self::zeros(&self.sizes).map_err(|e| ClassifyError::Format(e.to_string()))?;
        let shapes_match = self.weights.len() == reference.weights.len()
            && self.biases.len() == reference.biases.len()
            && self.weights.iter().zip(&reference.weights).all(|(a, b)| a.len() == b.len())
            && self.biases.iter().zip(&reference.biases).all(|(a, b)| a.len() == b.len())
            && self.input_mean.len() == self.sizes[0]
            && self.input_std.len() == self.sizes[0];
        if !shapes_match {
            return Err(ClassifyError::Format("array lengths do not match layer sizes".into()));
        }
        if self.params().iter().chain(&self.input_mean).any(|v| !v.is_finite())
            || self.input_std.iter().any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(ClassifyError::Format("non-finite parameter or non-positive scale".into()));
        }
        Ok(())
    }
}

fn sample_loss(acts: &[Vec<f64>], label: usize) -> f64 {
    let z = acts.last().unwrap();
    log_sum_exp(z) - z[label - 1]
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

pub(crate) fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// First index of the maximum.
pub(crate) fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

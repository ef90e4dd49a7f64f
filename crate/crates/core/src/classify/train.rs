use std::cell::RefCell;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::mlp::{Mlp, LOCALISER_SIZES};
use super::optim::{gd_momentum, scg, Objective, Optimizer};
use super::ClassifyError;

/// Inputs with 1-based class labels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self, ClassifyError> {
        if inputs.len() != labels.len() {
            return Err(ClassifyError::Shape { expected: inputs.len(), got: labels.len() });
        }
        Ok(Self { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub seed: u64,
    pub optimizer: Optimizer,
}


#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    /// Weights with the best validation accuracy seen.
    pub network: Mlp,
    pub best_iteration: usize,
    pub validation_accuracy: f64,
    pub iterations: usize,
    /// Training loss per optimiser iteration.
    pub loss_history: Vec<f64>,
}

/// Fraction of samples whose most probable class equals the label.
pub fn accuracy(net: &Mlp, data: &Dataset) -> Result<f64, ClassifyError> {
    if data.is_empty() {
        return Err(ClassifyError::Training("empty dataset".into()));
    }
    let mut correct = 0;
    for (x, &y) in data.inputs.iter().zip(&data.labels) {
        correct += (net.predict(x)? == y) as usize;
    }
    Ok(correct as f64 / data.len() as f64)
}

struct CrossEntropy<'a> {
    net: RefCell<Mlp>,
    data: &'a Dataset,
}

impl CrossEntropy<'_> {
    fn with_params<T>(&self, x: &[f64], f: impl FnOnce(&Mlp) -> T) -> T {
        let mut net = self.net.borrow_mut();
        net.set_params(x).expect("parameter count fixed by the optimiser");
        f(&net)
    }
}

impl Objective for CrossEntropy<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        self.with_params(x, |net| net.loss(&self.data.inputs, &self.data.labels).unwrap_or(f64::NAN))
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.with_params(x, |net| {
            net.loss_and_gradient(&self.data.inputs, &self.data.labels)
                .unwrap_or_else(|_| (f64::NAN, vec![f64::NAN; x.len()]))
        })
    }
}

/// Minimises mean cross-entropy on `train` from the weights in `net`,
/// keeping the weights with the best `valid` accuracy (earliest on ties).
/// The input scaling of `net` is used as given.
pub fn train_localiser(net: &Mlp, train: &Dataset, valid: &Dataset, optimizer: &Optimizer) -> Result<TrainReport, ClassifyError> {
    let initial_loss = net.loss(&train.inputs, &train.labels)?;
    if !initial_loss.is_finite() {
        return Err(ClassifyError::Training(format!("initial loss is {initial_loss}")));
    }
    let mut best = net.clone();
    let mut best_accuracy = accuracy(net, valid)?;
    let mut best_iteration = 0;
    let mut probe = net.clone();
    let mut failure = None;
    let mut observe = |iteration: usize, x: &[f64], loss: f64| {
        if !loss.is_finite() {
            failure = Some(format!("loss became {loss} at iteration {iteration}"));
            return ControlFlow::Break(());
        }
        probe.set_params(x).expect("parameter count fixed");
        match accuracy(&probe, valid) {
            Ok(acc) if acc > best_accuracy => {
                best_accuracy = acc;
                best_iteration = iteration;
                best.clone_from(&probe);
            }
            Ok(_) => {}
            Err(e) => {
                failure = Some(e.to_string());
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    };

    let objective = CrossEntropy { net: RefCell::new(net.clone()), data: train };
    let x0 = net.params();
    let report = match optimizer {
        Optimizer::Scg(settings) => scg(&objective, &x0, settings, &mut observe),
        Optimizer::Momentum { max_iterations, learning_rate, momentum } => {
            gd_momentum(&objective, &x0, *max_iterations, *learning_rate, *momentum, &mut observe)
        }
    };
    if let Some(message) = failure {
        return Err(ClassifyError::Training(message));
    }
    if !report.value.is_finite() {
        return Err(ClassifyError::Training(format!("final loss is {}", report.value)));
    }
    Ok(TrainReport {
        network: best,
        best_iteration,
        validation_accuracy: best_accuracy,
        iterations: report.iterations,
        loss_history: report.history,
    })
}

impl TrainConfig {
    /// Seeded localiser with input scaling taken from `train`, then trained.
    pub fn fit(&self, train: &Dataset, valid: &Dataset) -> Result<TrainReport, ClassifyError> {
        let mut net = Mlp::new(&LOCALISER_SIZES, self.seed)?;
        net.standardize_from(&train.inputs)?;
        train_localiser(&net, train, valid, &self.optimizer)
    }
}

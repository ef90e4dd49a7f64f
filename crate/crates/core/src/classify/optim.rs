//! Full-batch optimisers over a flat parameter vector.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

/// A differentiable scalar function.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScgSettings {
    pub max_iterations: usize,
    /// Stop once both the step and the change in value fall below these.
    pub x_tolerance: f64,
    pub f_tolerance: f64,
}

impl Default for ScgSettings {
    fn default() -> Self {
        Self { max_iterations: 1000, x_tolerance: 1e-10, f_tolerance: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Optimizer {
    Scg(ScgSettings),
    Momentum { max_iterations: usize, learning_rate: f64, momentum: f64 },
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Scg(ScgSettings::default())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Objective value after every iteration, starting with the initial one.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + alpha * d).collect()
}

/// Møller's scaled conjugate gradient. Steps are only taken when they do
/// not increase the objective, so `history` is non-increasing.
///
/// `observe(iteration, x, value)` runs after every accepted step and may
/// stop the run early.
pub fn scg<O, F>(objective: &O, x0: &[f64], settings: &ScgSettings, mut observe: F) -> OptimReport
where
    O: Objective + ?Sized,
    F: FnMut(usize, &[f64], f64) -> ControlFlow<()>,
{
    const SIGMA0: f64 = 1e-4;
    const BETA_MIN: f64 = 1e-15;
    const BETA_MAX: f64 = 1e100;

    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut f_old, mut grad_new) = objective.value_and_gradient(&x);
    let mut grad_old = grad_new.clone();
    let mut d: Vec<f64> = grad_new.iter().map(|g| -g).collect();
    let mut history = vec![f_old];

    let mut beta = 1.0;
    let mut success = true;
    let mut n_success = 0;
    let (mut mu, mut kappa, mut theta) = (0.0, 0.0, 0.0);
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        iterations += 1;
        if success {
            mu = dot(&d, &grad_new);
            if mu >= 0.0 {
                d = grad_new.iter().map(|g| -g).collect();
                mu = dot(&d, &grad_new);
            }
            kappa = dot(&d, &d);
            if kappa < f64::EPSILON {
                break;
            }
            let sigma = SIGMA0 / kappa.sqrt();
            let (_, grad_plus) = objective.value_and_gradient(&axpy(&x, sigma, &d));
            theta = d.iter().zip(grad_plus.iter().zip(&grad_new)).map(|(d, (p, g))| d * (p - g)).sum::<f64>() / sigma;
        }

        // scale the curvature estimate until it is positive
        let mut delta = theta + beta * kappa;
        if delta <= 0.0 {
            delta = beta * kappa;
            beta -= theta / kappa;
        }
        let alpha = -mu / delta;

        let x_new = axpy(&x, alpha, &d);
        let f_new = objective.value(&x_new);
        let comparison = 2.0 * (f_new - f_old) / (alpha * mu);
        if comparison >= 0.0 && f_new.is_finite() {
            success = true;
            n_success += 1;
            let step = d.iter().map(|d| (alpha * d).abs()).fold(0.0, f64::max);
            let change = (f_new - f_old).abs();
            x = x_new;
            f_old = f_new;
            history.push(f_new);
            grad_old = std::mem::replace(&mut grad_new, objective.value_and_gradient(&x).1);
            if observe(iterations, &x, f_new).is_break()
                || (step < settings.x_tolerance && change < settings.f_tolerance)
                || dot(&grad_new, &grad_new) == 0.0
            {
                break;
            }
        } else {
            success = false;
            history.push(f_old);
        }

        if comparison < 0.25 {
            beta = (4.0 * beta).min(BETA_MAX);
        }
        if comparison > 0.75 {
            beta = (0.5 * beta).max(BETA_MIN);
        }

        if n_success == n {
            d = grad_new.iter().map(|g| -g).collect();
            n_success = 0;
        } else if success {
            let gamma = grad_old.iter().zip(&grad_new).map(|(o, g)| (o - g) * g).sum::<f64>() / mu;
            d = d.iter().zip(&grad_new).map(|(d, g)| gamma * d - g).collect();
        }
    }
    OptimReport { x, value: f_old, iterations, history }
}

/// Gradient descent with heavy-ball momentum.
pub fn gd_momentum<O, F>(
    objective: &O,
    x0: &[f64],
    max_iterations: usize,
    learning_rate: f64,
    momentum: f64,
    mut observe: F,
) -> OptimReport
where
    O: Objective + ?Sized,
    F: FnMut(usize, &[f64], f64) -> ControlFlow<()>,
{
    let mut x = x0.to_vec();
    let mut v = vec![0.0; x.len()];
    let (mut f, mut g) = objective.value_and_gradient(&x);
    let mut history = vec![f];
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        for ((x, v), g) in x.iter_mut().zip(v.iter_mut()).zip(&g) {
            *v = momentum * *v - learning_rate * g;
            *x += *v;
        }
        (f, g) = objective.value_and_gradient(&x);
        history.push(f);
        if !f.is_finite() || observe(iterations, &x, f).is_break() {
            break;
        }
    }
    OptimReport { x, value: f, iterations, history }
}

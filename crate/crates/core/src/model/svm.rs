//! Linear SVM trained in the primal by stochastic subgradient steps
//! (Pegasos), returning the averaged iterate.
//!
//! Objective: lambda/2 |u|^2 + (1/n) sum_i loss_i with u = (w, b) acting on
//! x augmented by a constant 1, and lambda = 1 / (C n). Step size at global
//! step t is 1 / (lambda t); each epoch visits the rows in a fresh shuffled
//! order drawn from the supplied stream. Over the final tenth of epochs the
//! returned iterate is the epoch-end average with the lowest objective, so
//! its objective never increases there.

use crate::numerics::{dot, Matrix, RngStream};

pub const SVM_EPOCHS: usize = 2000;

#[derive(Clone, Copy, Debug)]
pub(super) enum Loss {
    /// Targets in {-1, +1}.
    Hinge,
    EpsilonInsensitive(f64),
}

pub(super) struct SvmFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective of the returned iterate after each epoch, when traced.
    #[cfg_attr(not(test), allow(dead_code))]
    pub trace: Vec<f64>,
}

fn augmented_dot(u: &[f64], row: &[f64]) -> f64 {
    let p = row.len();
    dot(&u[..p], row) + u[p]
}

fn loss_value(loss: Loss, score: f64, y: f64) -> f64 {
    match loss {
        Loss::Hinge => (1.0 - y * score).max(0.0),
        Loss::EpsilonInsensitive(eps) => ((score - y).abs() - eps).max(0.0),
    }
}

fn objective(x: &Matrix, y: &[f64], u: &[f64], loss: Loss, lambda: f64) -> f64 {
    let n = x.rows();
    let total: f64 = (0..n).map(|i| loss_value(loss, augmented_dot(u, x.row(i)), y[i])).sum();
    0.5 * lambda * dot(u, u) + total / n as f64
}

/// Objective value for explicit weights, with `lambda = 1 / (c n)`.
pub fn svm_objective(x: &Matrix, y: &[f64], weights: &[f64], bias: f64, c: f64, epsilon: Option<f64>) -> f64 {
    let mut u = weights.to_vec();
    u.push(bias);
    let loss = epsilon.map_or(Loss::Hinge, Loss::EpsilonInsensitive);
    objective(x, y, &u, loss, 1.0 / (c * x.rows() as f64))
}

pub(super) fn pegasos(x: &Matrix, y: &[f64], loss: Loss, c: f64, mut rng: RngStream, trace: bool) -> SvmFit {
    let (n, p) = (x.rows(), x.cols());
    let lambda = 1.0 / (c * n as f64);
    // The optimum lies in the ball where lambda/2 |u|^2 <= objective(0).
    let radius = match loss {
        Loss::Hinge => 1.0 / lambda.sqrt(),
        Loss::EpsilonInsensitive(_) => {
            let at_zero = objective(x, y, &vec![0.0; p + 1], loss, lambda);
            (2.0 * at_zero / lambda).sqrt()
        }
    };
    let mut u = vec![0.0; p + 1];
    let mut avg = vec![0.0; p + 1];
    let mut order: Vec<usize> = (0..n).collect();
    let mut t = 0.0f64;
    let mut history = Vec::new();
    let pocket_from = SVM_EPOCHS - SVM_EPOCHS / 10;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for epoch in 0..SVM_EPOCHS {
        rng.shuffle(&mut order);
        for &i in &order {
            t += 1.0;
            let eta = 1.0 / (lambda * t);
            let row = x.row(i);
            let score = augmented_dot(&u, row);
            let direction = match loss {
                Loss::Hinge => {
                    if y[i] * score < 1.0 {
                        y[i]
                    } else {
                        0.0
                    }
                }
                Loss::EpsilonInsensitive(eps) => {
                    let r = score - y[i];
                    if r > eps {
                        -1.0
                    } else if r < -eps {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            let shrink = 1.0 - 1.0 / t;
            for v in u.iter_mut() {
                *v *= shrink;
            }
            if direction != 0.0 {
                let step = eta * direction;
                for j in 0..p {
                    u[j] += step * row[j];
                }
                u[p] += step;
            }
            let norm = dot(&u, &u).sqrt();
            if norm > radius {
                let s = radius / norm;
                for v in u.iter_mut() {
                    *v *= s;
                }
            }
            for (a, v) in avg.iter_mut().zip(&u) {
                *a += (v - *a) / t;
            }
        }
        if epoch >= pocket_from {
            let f = objective(x, y, &avg, loss, lambda);
            if best.as_ref().is_none_or(|(bf, _)| f <= *bf) {
                best = Some((f, avg.clone()));
            }
        }
        if trace {
            let f = match &best {
                Some((bf, _)) => *bf,
                None => objective(x, y, &avg, loss, lambda),
            };
            history.push(f);
        }
    }
    let mut out = best.map_or(avg, |(_, u)| u);
    let bias = out[p];
    out.truncate(p);
    SvmFit {
        weights: out,
        bias,
        trace: history,
    }
}

//! L2-penalized logistic regression by damped Newton iterations.
//!
//! Objective: sum_i [log(1 + e^{z_i}) - y_i z_i] + lambda/2 |w|^2 with
//! z_i = w.x_i + b and y_i in {0, 1}. The intercept is not penalized.

use crate::numerics::{cholesky_solve, dot, Matrix};

pub const LOGISTIC_TOL: f64 = 1e-8;
pub const LOGISTIC_MAX_ITER: usize = 100;

pub(super) struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: f64,
}

fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn objective(x: &Matrix, y: &[f64], w: &[f64], b: f64, lambda: f64) -> f64 {
    let loss: f64 = (0..x.rows())
        .map(|i| {
            let z = dot(x.row(i), w) + b;
            log1p_exp(z) - y[i] * z
        })
        .sum();
    loss + 0.5 * lambda * dot(w, w)
}

/// Gradient of the objective as `[d/db, d/dw_1, ..., d/dw_p]`.
pub fn logistic_gradient(x: &Matrix, y: &[f64], w: &[f64], b: f64, lambda: f64) -> Vec<f64> {
    let p = x.cols();
    let mut g = vec![0.0; p + 1];
    for i in 0..x.rows() {
        let row = x.row(i);
        let r = sigmoid(dot(row, w) + b) - y[i];
        g[0] += r;
        for j in 0..p {
            g[j + 1] += r * row[j];
        }
    }
    for j in 0..p {
        g[j + 1] += lambda * w[j];
    }
    g
}

pub(super) fn fit_binary(x: &Matrix, y: &[f64], lambda: f64) -> LogisticFit {
    let (n, p) = (x.rows(), x.cols());
    let mut w = vec![0.0; p];
    let mut b = 0.0;
    let mut f = objective(x, y, &w, b, lambda);
    for _ in 0..LOGISTIC_MAX_ITER {
        let g = logistic_gradient(x, y, &w, b, lambda);
        let gnorm = dot(&g, &g).sqrt();
        if gnorm <= LOGISTIC_TOL {
            break;
        }
        // Hessian over (b, w).
        let mut h = Matrix::zeros(p + 1, p + 1);
        for i in 0..n {
            let row = x.row(i);
            let s = sigmoid(dot(row, &w) + b);
            let weight = s * (1.0 - s);
            for a in 0..=p {
                let xa = if a == 0 { 1.0 } else { row[a - 1] };
                for c in a..=p {
                    let xc = if c == 0 { 1.0 } else { row[c - 1] };
                    let v = h.get(a, c) + weight * xa * xc;
                    h.set(a, c, v);
                }
            }
        }
        for a in 0..=p {
            for c in 0..a {
                let v = h.get(c, a);
                h.set(a, c, v);
            }
            let extra = if a == 0 { 0.0 } else { lambda };
            let d = h.get(a, a) + extra + 1e-12;
            h.set(a, a, d);
        }
        let step = cholesky_solve(&h, &g).unwrap_or_else(|| g.clone());
        let mut t = 1.0;
        let slope = dot(&g, &step);
        let mut accepted = false;
        for _ in 0..60 {
            let nb = b - t * step[0];
            let nw: Vec<f64> = w.iter().zip(&step[1..]).map(|(wi, si)| wi - t * si).collect();
            let nf = objective(x, y, &nw, nb, lambda);
            if nf <= f - 1e-4 * t * slope {
                w = nw;
                b = nb;
                f = nf;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    LogisticFit { weights: w, bias: b }
}

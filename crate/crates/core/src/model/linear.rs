use crate::error::Result;
use crate::numerics::{cholesky_solve, dot, least_squares, mean, Matrix};

pub(super) fn fit_ols(x: &Matrix, y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let ls = least_squares(x, y, true)?;
    Ok((ls.coef, ls.intercept))
}

/// Ridge with an unpenalized intercept: solve on centered data, then
/// recover the intercept from the means.
pub(super) fn fit_ridge(x: &Matrix, y: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    if lambda == 0.0 {
        return fit_ols(x, y);
    }
    let (n, p) = (x.rows(), x.cols());
    let x_mean: Vec<f64> = (0..p).map(|j| mean(&x.column(j))).collect();
    let y_mean = mean(y);
    let mut gram = Matrix::zeros(p, p);
    let mut rhs = vec![0.0; p];
    for i in 0..n {
        let row = x.row(i);
        let yc = y[i] - y_mean;
        for a in 0..p {
            let xa = row[a] - x_mean[a];
            rhs[a] += xa * yc;
            for b in a..p {
                let v = gram.get(a, b) + xa * (row[b] - x_mean[b]);
                gram.set(a, b, v);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            let v = gram.get(b, a);
            gram.set(a, b, v);
        }
        let d = gram.get(a, a) + lambda;
        gram.set(a, a, d);
    }
    let coef = match cholesky_solve(&gram, &rhs) {
        Some(c) => c,
        // Only reachable when lambda is tiny against the data scale.
        None => return fit_ols(x, y),
    };
    let intercept = y_mean - dot(&x_mean, &coef);
    Ok((coef, intercept))
}

use super::{numeric_inputs, Retain, TransformState};
use crate::error::{Error, Result};
use crate::numerics::{mean, sym_eigen, Matrix};
use crate::table::{Column, Table};

/// Eigenvalues at or below this share of the trace count as null.
const NULL_EIGEN: f64 = 1e-12;

pub(super) fn fit(train: &Table, inputs: &[String], retain: Retain) -> Result<TransformState> {
    let cols = numeric_inputs(train, inputs)?;
    let n = train.n_rows();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("pca needs at least 2 training rows, got {n}")));
    }
    let p = cols.len();
    let means: Vec<f64> = cols.iter().map(|c| mean(c)).collect();
    let mut cov = Matrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let s: f64 = (0..n).map(|i| (cols[a][i] - means[a]) * (cols[b][i] - means[b])).sum();
            let v = s / (n - 1) as f64;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }
    let eig = sym_eigen(&cov)?;
    let trace: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    let k = match retain {
        Retain::Count(k) => {
            if k > p {
                return Err(Error::InvalidParameter(format!(
                    "pca cannot retain {k} components from {p} columns"
                )));
            }
            k
        }
        Retain::Fraction(f) if f >= 1.0 => eig.values.iter().filter(|&&v| v > NULL_EIGEN * trace).count(),
        Retain::Fraction(f) => {
            let mut cum = 0.0;
            let mut k = 0;
            for &v in &eig.values {
                if trace > 0.0 && cum / trace >= f {
                    break;
                }
                cum += v.max(0.0);
                k += 1;
            }
            k
        }
    };
    if k == 0 {
        return Err(Error::NoFeaturesRemain);
    }
    let mut components = Matrix::zeros(p, k);
    for a in 0..p {
        for j in 0..k {
            components.set(a, j, eig.vectors.get(a, j));
        }
    }
    Ok(TransformState::Pca {
        means,
        components,
        eigenvalues: eig.values[..k].to_vec(),
        outputs: (0..k).map(|j| format!("pca_{j}")).collect(),
    })
}

pub(super) fn apply(
    table: &Table,
    inputs: &[String],
    means: &[f64],
    components: &Matrix,
    outputs: &[String],
) -> Result<Table> {
    let cols = numeric_inputs(table, inputs)?;
    let n = table.n_rows();
    let mut projected = vec![vec![0.0; n]; outputs.len()];
    for i in 0..n {
        for (a, col) in cols.iter().enumerate() {
            let centered = col[i] - means[a];
            for (j, out) in projected.iter_mut().enumerate() {
                out[i] += centered * components.get(a, j);
            }
        }
    }
    let add = outputs.iter().cloned().zip(projected.into_iter().map(Column::Numeric)).collect();
    table.with_columns_swapped(inputs, add)
}

use super::{numeric_inputs, Aggregation, CbpmParams, SignMode, TransformState};
use crate::error::{Error, Result};
use crate::numerics::{pearson_p, pearson_r};
use crate::table::{Column, Table};

pub const CBPM_POS: &str = "cbpm_pos";
pub const CBPM_NEG: &str = "cbpm_neg";
/// Single zero column emitted when no requested group selected anything.
pub const CBPM_EMPTY: &str = "cbpm_empty";

pub(super) fn fit(
    train: &Table,
    inputs: &[String],
    y: &[f64],
    params: &CbpmParams,
    warnings: &mut Vec<String>,
) -> Result<TransformState> {
    let cols = numeric_inputs(train, inputs)?;
    let n = train.n_rows();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cbpm needs at least 3 training rows, got {n}")));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::ZeroVariance);
    }
    let mut correlations = Vec::with_capacity(cols.len());
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (name, col) in inputs.iter().zip(&cols) {
        let r = match pearson_r(col, y) {
            Ok(r) => r,
            // A feature constant on the fitting rows has no correlation.
            Err(Error::ZeroVariance) => {
                correlations.push(None);
                continue;
            }
            Err(e) => return Err(e),
        };
        correlations.push(Some(r));
        if pearson_p(r, n)? < params.alpha {
            if r > 0.0 {
                positive.push(name.clone());
            } else if r < 0.0 {
                negative.push(name.clone());
            }
        }
    }
    let want_pos = params.sign_mode != SignMode::Negative;
    let want_neg = params.sign_mode != SignMode::Positive;
    let any = (want_pos && !positive.is_empty()) || (want_neg && !negative.is_empty());
    let outputs: Vec<String> = if !any {
        warnings.push(format!(
            "cbpm: no feature passed p < {} in the requested groups; emitting a zero column",
            params.alpha
        ));
        vec![CBPM_EMPTY.to_string()]
    } else {
        let mut out = Vec::new();
        if want_pos {
            if positive.is_empty() {
                warnings.push(format!("cbpm: positive group is empty at p < {}", params.alpha));
            }
            out.push(CBPM_POS.to_string());
        }
        if want_neg {
            if negative.is_empty() {
                warnings.push(format!("cbpm: negative group is empty at p < {}", params.alpha));
            }
            out.push(CBPM_NEG.to_string());
        }
        out
    };
    Ok(TransformState::Cbpm {
        params: params.clone(),
        positive,
        negative,
        correlations,
        outputs,
    })
}

fn aggregate(table: &Table, group: &[String], how: Aggregation) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; table.n_rows()];
    for name in group {
        for (a, v) in acc.iter_mut().zip(table.numeric(name)?) {
            *a += v;
        }
    }
    if how == Aggregation::Mean && !group.is_empty() {
        let k = group.len() as f64;
        for a in &mut acc {
            *a /= k;
        }
    }
    Ok(acc)
}

pub(super) fn apply(
    table: &Table,
    inputs: &[String],
    params: &CbpmParams,
    positive: &[String],
    negative: &[String],
    outputs: &[String],
) -> Result<Table> {
    numeric_inputs(table, inputs)?;
    let mut add = Vec::with_capacity(outputs.len());
    for name in outputs {
        let values = match name.as_str() {
            CBPM_POS => aggregate(table, positive, params.aggregation)?,
            CBPM_NEG => aggregate(table, negative, params.aggregation)?,
            _ => vec![0.0; table.n_rows()],
        };
        add.push((name.clone(), Column::Numeric(values)));
    }
    table.with_columns_swapped(inputs, add)
}

use super::{numeric_inputs, ConfoundRemoverParams, TransformState};
use crate::error::{Error, Result};
use crate::numerics::{least_squares, LeastSquares, Matrix};
use crate::table::{resolve_selector, Column, FeatureTypeMap, Table};

pub(super) fn fit(
    train: &Table,
    types: &FeatureTypeMap,
    features: &[String],
    params: &ConfoundRemoverParams,
) -> Result<TransformState> {
    let confounds = resolve_selector(&params.confounds, train, types)?;
    if let Some(both) = features.iter().find(|f| confounds.contains(f)) {
        return Err(Error::InvalidParameter(format!(
            "column `{both}` is selected both as a feature and as a confound"
        )));
    }
    let conf_cols = numeric_inputs(train, &confounds)?;
    let feat_cols = numeric_inputs(train, features)?;
    let rows: Vec<usize> = match &params.subgroup {
        None => (0..train.n_rows()).collect(),
        Some((column, value)) => {
            if train.is_feature(column) {
                return Err(Error::Subgroup(format!("subgroup column `{column}` must not be a feature")));
            }
            let labels = train.labels(column)?;
            let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == *value).collect();
            if rows.is_empty() {
                return Err(Error::Subgroup(format!(
                    "value `{value}` of `{column}` is absent from the training rows"
                )));
            }
            let needed = confounds.len() + 2;
            if rows.len() < needed {
                return Err(Error::Subgroup(format!(
                    "{} training rows with `{column}` = `{value}`, need at least {needed}",
                    rows.len()
                )));
            }
            rows
        }
    };
    let design: Vec<Vec<f64>> = conf_cols.iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect();
    let design_refs: Vec<&[f64]> = design.iter().map(Vec::as_slice).collect();
    let x = Matrix::from_columns(rows.len(), &design_refs)?;
    let mut fits = Vec::with_capacity(features.len());
    for col in &feat_cols {
        let y: Vec<f64> = rows.iter().map(|&i| col[i]).collect();
        fits.push(least_squares(&x, &y, params.include_intercept)?);
    }
    Ok(TransformState::ConfoundRemover {
        confounds,
        fits,
        subgroup: params.subgroup.clone(),
        n_fit_rows: rows.len(),
    })
}

pub(super) fn apply(table: &Table, features: &[String], confounds: &[String], fits: &[LeastSquares]) -> Result<Table> {
    let conf_cols = numeric_inputs(table, confounds)?;
    let feat_cols = numeric_inputs(table, features)?;
    let mut out = Vec::with_capacity(features.len());
    let mut row = vec![0.0; confounds.len()];
    for ((name, col), fit) in features.iter().zip(&feat_cols).zip(fits) {
        let resid = (0..table.n_rows())
            .map(|i| {
                for (r, c) in row.iter_mut().zip(&conf_cols) {
                    *r = c[i];
                }
                col[i] - fit.predict_row(&row)
            })
            .collect();
        out.push((name.clone(), Column::Numeric(resid)));
    }
    table.with_replaced(out)
}

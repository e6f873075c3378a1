use serde::{Deserialize, Serialize};

use super::splits::{make_splits, CvScheme};
use crate::error::{Error, Result};
use crate::model::{ProblemType, Target};
use crate::numerics::{mean, RngStream};
use crate::pipeline::{fit_pipeline, pipeline_predict, ParamChoice, PipelineSpec};
use crate::score::{score, Metric};
use crate::table::{FeatureTypeMap, Table};

/// Inner-CV evaluation of every grid candidate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningTable {
    pub objective: Metric,
    pub candidates: Vec<TuningRow>,
    /// Index of the winning candidate.
    pub best: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningRow {
    pub params: Vec<ParamChoice>,
    pub fold_scores: Vec<f64>,
    pub mean: f64,
}

/// Inner scheme used when none is configured: 5 folds, not shuffled,
/// stratified for classification.
pub fn default_inner_scheme(problem: ProblemType) -> CvScheme {
    match problem {
        ProblemType::Classification => CvScheme::StratifiedKfold { k: 5, shuffle: false },
        ProblemType::Regression => CvScheme::Kfold { k: 5, shuffle: false },
    }
}

/// Labels and group labels a scheme needs from `table`.
pub(crate) fn scheme_inputs(scheme: &CvScheme, table: &Table, target: &Target) -> Result<(Option<Vec<String>>, Option<Vec<String>>)> {
    let y = target.labels().map(<[String]>::to_vec);
    let groups = match scheme.group_column() {
        Some(col) => Some(table.labels(col)?),
        None => None,
    };
    Ok((y, groups))
}

/// Grid search by inner cross-validation on `train` only. Returns the pipeline
/// collapsed to the winner (highest mean objective, first on ties) and the
/// inner table; a grid of one candidate returns the pipeline unchanged and no
/// table.
pub fn tune_grid(
    spec: &PipelineSpec,
    train: &Table,
    types: &FeatureTypeMap,
    target: &Target,
    inner: &CvScheme,
    objective: Metric,
    rng: &RngStream,
) -> Result<(PipelineSpec, Option<TuningTable>)> {
    if spec.grid_size() == 1 {
        return Ok((spec.clone(), None));
    }
    let (y, groups) = scheme_inputs(inner, train, target)?;
    let plan = make_splits(inner, train.n_rows(), y.as_deref(), groups.as_deref(), &rng.split(0))?;
    let fit_streams = rng.split(1);
    let folds: Vec<(Table, Target, Table, Target)> = plan
        .folds
        .iter()
        .map(|f| {
            (
                train.take_rows(&f.train),
                target.take(&f.train),
                train.take_rows(&f.test),
                target.take(&f.test),
            )
        })
        .collect();
    let mut rows = Vec::new();
    for params in spec.candidates() {
        let candidate = spec.with_choice(&params)?;
        let mut fold_scores = Vec::with_capacity(folds.len());
        for (i, (tr, ytr, te, yte)) in folds.iter().enumerate() {
            let s = fit_pipeline(&candidate, tr, types, ytr, &fit_streams.split(i as u64))
                .and_then(|fp| pipeline_predict(&fp, te))
                .and_then(|pred| score(objective, yte, &pred))
                .map_err(|e| Error::InnerFold {
                    fold: i,
                    source: Box::new(e),
                })?;
            fold_scores.push(s);
        }
        rows.push(TuningRow {
            mean: mean(&fold_scores),
            params,
            fold_scores,
        });
    }
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.mean > rows[best].mean {
            best = i;
        }
    }
    let resolved = spec.with_choice(&rows[best].params)?;
    Ok((
        resolved,
        Some(TuningTable {
            objective,
            candidates: rows,
            best,
        }),
    ))
}

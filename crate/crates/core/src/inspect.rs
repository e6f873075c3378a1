//! Read-only views of a finished cross-validation run.

use indexmap::IndexMap;
use serde::Serialize;

use crate::cv::{CvResult, Outcome};
use crate::error::{Error, Result};
use crate::model::ModelState;
use crate::params::ParamValue;
use crate::pipeline::FittedPipeline;
use crate::transform::TransformState;

/// One out-of-fold prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionRow {
    pub index: usize,
    pub repeat: usize,
    pub fold: usize,
    pub y_true: Outcome,
    pub y_pred: Outcome,
}

/// Every held-out prediction: one row per test sample per repeat.
pub fn fold_predictions(result: &CvResult) -> Vec<PredictionRow> {
    result
        .predictions
        .iter()
        .map(|p| PredictionRow {
            index: p.index,
            repeat: p.repeat,
            fold: p.fold,
            y_true: p.y_true.clone(),
            y_pred: p.y_pred.clone(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FittedValue {
    Number(f64),
    Count(usize),
    Numbers(Vec<f64>),
    Names(Vec<String>),
    Text(String),
    /// Row-major.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepSummary {
    pub kind: String,
    pub hyperparameters: IndexMap<String, ParamValue>,
    pub fitted: IndexMap<String, FittedValue>,
}

/// Access to the fitted per-fold pipelines, which exist only when the run
/// retained them.
pub struct InspectionView<'a> {
    result: &'a CvResult,
    pipelines: &'a [FittedPipeline],
}

impl<'a> InspectionView<'a> {
    pub fn new(result: &'a CvResult) -> Result<Self> {
        match &result.pipelines {
            Some(pipelines) => Ok(Self { result, pipelines }),
            None => Err(Error::NotRetained("fitted pipelines")),
        }
    }

    pub fn pipeline(&self, repeat: usize, fold: usize) -> Result<&'a FittedPipeline> {
        let pos = self
            .result
            .plan
            .folds
            .iter()
            .position(|f| f.repeat == repeat && f.fold == fold)
            .ok_or(Error::OutOfRange(format!(
                "repeat {repeat}, fold {fold} (plan has {} repeats of {} folds)",
                self.result.plan.n_repeats(),
                self.result.plan.folds.iter().filter(|f| f.repeat == 0).count()
            )))?;
        Ok(&self.pipelines[pos])
    }

    /// Hyperparameters and learned state of every step, keyed by step name
    /// in pipeline order.
    pub fn fitted_params(&self, repeat: usize, fold: usize) -> Result<IndexMap<String, StepSummary>> {
        Ok(summarize(self.pipeline(repeat, fold)?))
    }
}

fn hyperparameters(fp: &FittedPipeline, step: &str) -> IndexMap<String, ParamValue> {
    fp.params()
        .iter()
        .filter(|c| c.step == step)
        .map(|c| (c.param.clone(), c.value.clone()))
        .collect()
}

fn names(v: &[String]) -> FittedValue {
    FittedValue::Names(v.to_vec())
}

/// Per-step summaries of a fitted pipeline, model step last.
pub fn summarize(fp: &FittedPipeline) -> IndexMap<String, StepSummary> {
    let mut out = IndexMap::new();
    for step in fp.steps() {
        let t = &step.transformer;
        let mut fitted = IndexMap::new();
        fitted.insert("inputs".to_string(), names(t.inputs()));
        match t.state() {
            TransformState::Zscore { means, stds } => {
                fitted.insert("means".into(), FittedValue::Numbers(means.clone()));
                fitted.insert("stds".into(), FittedValue::Numbers(stds.clone()));
            }
            TransformState::VarianceThreshold { variances, kept, .. } => {
                let dropped: Vec<String> = t.inputs().iter().filter(|c| !kept.contains(c)).cloned().collect();
                fitted.insert("variances".into(), FittedValue::Numbers(variances.clone()));
                fitted.insert("kept".into(), names(kept));
                fitted.insert("dropped".into(), FittedValue::Names(dropped));
            }
            TransformState::Pca {
                components,
                eigenvalues,
                outputs,
                ..
            } => {
                fitted.insert("n_components".into(), FittedValue::Count(outputs.len()));
                fitted.insert("eigenvalues".into(), FittedValue::Numbers(eigenvalues.clone()));
                fitted.insert("outputs".into(), names(outputs));
                let rows = (0..components.rows()).map(|i| components.row(i).to_vec()).collect();
                fitted.insert("components".into(), FittedValue::Matrix(rows));
            }
            TransformState::ConfoundRemover {
                confounds,
                fits,
                subgroup,
                n_fit_rows,
            } => {
                fitted.insert("confounds".into(), names(confounds));
                fitted.insert(
                    "coefficients".into(),
                    FittedValue::Matrix(fits.iter().map(|f| f.coef.clone()).collect()),
                );
                fitted.insert(
                    "intercepts".into(),
                    FittedValue::Numbers(fits.iter().map(|f| f.intercept).collect()),
                );
                if let Some((col, value)) = subgroup {
                    fitted.insert("subgroup".into(), FittedValue::Text(format!("{col}={value}")));
                }
                fitted.insert("n_fit_rows".into(), FittedValue::Count(*n_fit_rows));
            }
            TransformState::Cbpm {
                positive,
                negative,
                outputs,
                ..
            } => {
                fitted.insert("positive".into(), names(positive));
                fitted.insert("negative".into(), names(negative));
                fitted.insert("outputs".into(), names(outputs));
            }
        }
        out.insert(
            step.name.clone(),
            StepSummary {
                kind: t.kind().to_string(),
                hyperparameters: hyperparameters(fp, &step.name),
                fitted,
            },
        );
    }

    let mut fitted = IndexMap::new();
    fitted.insert("inputs".to_string(), names(fp.model_inputs()));
    match fp.model().state() {
        ModelState::Mean(m) => {
            fitted.insert("mean".into(), FittedValue::Number(*m));
        }
        ModelState::Majority(c) => {
            fitted.insert("majority".into(), FittedValue::Text(c.clone()));
        }
        ModelState::Linear { coef, intercept } => {
            fitted.insert("coef".into(), FittedValue::Numbers(coef.clone()));
            fitted.insert("intercept".into(), FittedValue::Number(*intercept));
        }
        ModelState::Classifier { classes, weights } => {
            fitted.insert("classes".into(), names(classes));
            fitted.insert(
                "coef".into(),
                FittedValue::Matrix(weights.iter().map(|(w, _)| w.clone()).collect()),
            );
            fitted.insert(
                "intercept".into(),
                FittedValue::Numbers(weights.iter().map(|(_, b)| *b).collect()),
            );
        }
    }
    out.insert(
        fp.model_step().to_string(),
        StepSummary {
            kind: fp.model().name().to_string(),
            hyperparameters: hyperparameters(fp, fp.model_step()),
            fitted,
        },
    );
    out
}

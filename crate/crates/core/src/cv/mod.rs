//! Cross-validated evaluation of a pipeline, with nested grid search.

mod splits;
mod tuning;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use splits::{make_splits, CvScheme, Fold, FoldPlan};
pub use tuning::{default_inner_scheme, tune_grid, TuningRow, TuningTable};

use crate::error::{Error, Result};
use crate::model::{ProblemType, Target};
use crate::numerics::{mean, std_dev, RngStream};
use crate::pipeline::{fit_pipeline, pipeline_predict, FittedPipeline, ParamChoice, PipelineSpec};
use crate::score::{score, Metric};
use crate::table::{Column, ColumnRole, FeatureTypeMap, Table};

/// Inner-CV settings; `None` fields take the documented defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TuningConfig {
    pub inner: Option<CvScheme>,
    /// Defaults to the first scoring metric.
    pub objective: Option<Metric>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvSetup {
    pub features: Vec<String>,
    pub target: String,
    pub types: FeatureTypeMap,
    pub pipeline: PipelineSpec,
    pub scheme: CvScheme,
    pub scoring: Vec<Metric>,
    pub tuning: TuningConfig,
    pub seed: u64,
    pub retain_pipelines: bool,
    /// Worker threads for fold evaluation; results never depend on it.
    pub jobs: usize,
}

/// A true or predicted value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Number(f64),
    Label(String),
}

impl Outcome {
    fn all(t: &Target) -> Vec<Outcome> {
        match t {
            Target::Continuous(v) => v.iter().map(|x| Outcome::Number(*x)).collect(),
            Target::Classes(v) => v.iter().map(|x| Outcome::Label(x.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub repeat: usize,
    pub fold: usize,
    pub metric: Metric,
    pub value: f64,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub repeat: usize,
    pub fold: usize,
    pub index: usize,
    pub y_true: Outcome,
    pub y_pred: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldParams {
    pub repeat: usize,
    pub fold: usize,
    pub params: Vec<ParamChoice>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldTuning {
    pub repeat: usize,
    pub fold: usize,
    pub table: TuningTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub problem_type: ProblemType,
    pub plan: FoldPlan,
    /// Fold-major, metrics in scoring order within a fold.
    pub scores: Vec<ScoreRecord>,
    /// Fold-major, test rows ascending within a fold.
    pub predictions: Vec<PredictionRecord>,
    pub chosen_params: Vec<FoldParams>,
    /// Only folds whose grid needed an inner search.
    pub tuning: Vec<FoldTuning>,
    /// One per fold in plan order, when retention was requested.
    pub pipelines: Option<Vec<FittedPipeline>>,
    pub warnings: Vec<String>,
    pub summary: Vec<MetricSummary>,
}

impl CvResult {
    /// Per-fold values of one metric, in plan order.
    pub fn metric_values(&self, metric: Metric) -> Vec<f64> {
        self.scores.iter().filter(|s| s.metric == metric).map(|s| s.value).collect()
    }

    pub fn mean_score(&self, metric: Metric) -> Option<f64> {
        self.summary.iter().find(|s| s.metric == metric).map(|s| s.mean)
    }
}

struct FoldOutcome {
    scores: Vec<f64>,
    predictions: Target,
    params: Vec<ParamChoice>,
    tuning: Option<TuningTable>,
    pipeline: Option<FittedPipeline>,
    warnings: Vec<String>,
}

/// Assembles the working table: features, then the target, then auxiliary
/// columns (group labels, subgroup columns).
pub fn working_table(data: &Table, setup: &CvSetup) -> Result<(Table, Target)> {
    if setup.features.is_empty() {
        return Err(Error::EmptySelection);
    }
    if setup.features.contains(&setup.target) {
        return Err(Error::InvalidParameter(format!(
            "target `{}` is also listed as a feature",
            setup.target
        )));
    }
    let mut aux: Vec<String> = Vec::new();
    if let Some(g) = setup.scheme.group_column() {
        aux.push(g.to_string());
    }
    if let Some(inner) = &setup.tuning.inner {
        if let Some(g) = inner.group_column() {
            aux.push(g.to_string());
        }
    }
    for step in setup.pipeline.steps() {
        for (p, values) in &step.params {
            if p == "subgroup_column" {
                aux.extend(values.iter().filter_map(|v| v.as_str()).map(str::to_string));
            }
        }
    }
    aux.retain(|c| *c != setup.target);
    let mut seen = std::collections::BTreeSet::new();
    aux.retain(|c| seen.insert(c.clone()));
    if let Some(both) = aux.iter().find(|c| setup.features.contains(c)) {
        return Err(Error::InvalidParameter(format!(
            "column `{both}` is used for grouping and must not be a feature"
        )));
    }
    let mut names: Vec<&str> = setup.features.iter().map(String::as_str).collect();
    names.push(&setup.target);
    names.extend(aux.iter().map(String::as_str));
    let mut table = data.select(&names)?.with_role(&setup.target, ColumnRole::Target)?;
    for a in &aux {
        table = table.with_role(a, ColumnRole::Auxiliary)?;
    }
    let target = match (setup.pipeline.problem_type(), data.column(&setup.target)?) {
        (ProblemType::Regression, Column::Numeric(v)) => Target::Continuous(v.clone()),
        (ProblemType::Regression, Column::Categorical(_)) => return Err(Error::NotNumeric(setup.target.clone())),
        (ProblemType::Classification, _) => Target::Classes(data.labels(&setup.target)?),
    };
    Ok((table, target))
}

/// Runs the outer cross-validation. Each fold's seeds derive from
/// `(seed, fold position)`, so results do not depend on `jobs`.
pub fn run_cross_validation(data: &Table, setup: &CvSetup) -> Result<CvResult> {
    setup.pipeline.validate()?;
    setup.types.validate(data)?;
    if setup.scoring.is_empty() {
        return Err(Error::Metric("no scoring metric given".into()));
    }
    let problem = setup.pipeline.problem_type();
    if let Some(m) = setup.scoring.iter().find(|m| m.problem_type() != problem) {
        return Err(Error::Metric(format!("`{m}` is not defined for {}", problem.name())));
    }
    let objective = setup.tuning.objective.unwrap_or(setup.scoring[0]);
    if objective.problem_type() != problem {
        return Err(Error::Metric(format!("`{objective}` is not defined for {}", problem.name())));
    }
    let inner = setup.tuning.inner.clone().unwrap_or_else(|| default_inner_scheme(problem));
    let (table, target) = working_table(data, setup)?;

    let root = RngStream::new(setup.seed, 0);
    let (y_labels, groups) = tuning::scheme_inputs(&setup.scheme, &table, &target)?;
    let plan = make_splits(&setup.scheme, table.n_rows(), y_labels.as_deref(), groups.as_deref(), &root.split(0))?;
    let fold_streams = root.split(1);

    let eval = |pos: usize, fold: &Fold| -> Result<FoldOutcome> {
        let rng = fold_streams.split(pos as u64);
        let train = table.take_rows(&fold.train);
        let y_train = target.take(&fold.train);
        let test = table.take_rows(&fold.test);
        let y_test = target.take(&fold.test);
        let (resolved, tuning) = tune_grid(&setup.pipeline, &train, &setup.types, &y_train, &inner, objective, &rng.split(0))?;
        let fp = fit_pipeline(&resolved, &train, &setup.types, &y_train, &rng.split(1))?;
        let predictions = pipeline_predict(&fp, &test)?;
        let scores = setup
            .scoring
            .iter()
            .map(|m| score(*m, &y_test, &predictions))
            .collect::<Result<Vec<_>>>()?;
        Ok(FoldOutcome {
            scores,
            predictions,
            params: fp.params().to_vec(),
            tuning,
            warnings: fp.warnings().to_vec(),
            pipeline: setup.retain_pipelines.then_some(fp),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(setup.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<FoldOutcome>> =
        pool.install(|| plan.folds.par_iter().enumerate().map(|(pos, f)| eval(pos, f)).collect());

    let mut result = CvResult {
        problem_type: problem,
        plan: FoldPlan { n: plan.n, folds: Vec::new() },
        scores: Vec::new(),
        predictions: Vec::new(),
        chosen_params: Vec::new(),
        tuning: Vec::new(),
        pipelines: setup.retain_pipelines.then(Vec::new),
        warnings: Vec::new(),
        summary: Vec::new(),
    };
    for (fold, outcome) in plan.folds.iter().zip(outcomes) {
        let o = outcome.map_err(|e| Error::Fold {
            repeat: fold.repeat,
            fold: fold.fold,
            source: Box::new(e),
        })?;
        let (repeat, f) = (fold.repeat, fold.fold);
        for (m, v) in setup.scoring.iter().zip(&o.scores) {
            result.scores.push(ScoreRecord {
                repeat,
                fold: f,
                metric: *m,
                value: *v,
                n_train: fold.train.len(),
                n_test: fold.test.len(),
            });
        }
        let truth = Outcome::all(&target.take(&fold.test));
        for ((&index, y_true), y_pred) in fold.test.iter().zip(truth).zip(Outcome::all(&o.predictions)) {
            result.predictions.push(PredictionRecord {
                repeat,
                fold: f,
                index,
                y_true,
                y_pred,
            });
        }
        result.chosen_params.push(FoldParams {
            repeat,
            fold: f,
            params: o.params,
        });
        if let Some(table) = o.tuning {
            result.tuning.push(FoldTuning { repeat, fold: f, table });
        }
        if let (Some(all), Some(fp)) = (result.pipelines.as_mut(), o.pipeline) {
            all.push(fp);
        }
        result
            .warnings
            .extend(o.warnings.into_iter().map(|w| format!("repeat {repeat}, fold {f}: {w}")));
    }
    result.plan = plan;
    result.summary = setup
        .scoring
        .iter()
        .map(|m| {
            let values = result.metric_values(*m);
            MetricSummary {
                metric: *m,
                mean: mean(&values),
                std: std_dev(&values),
            }
        })
        .collect();
    Ok(result)
}

//! Final estimators behind a single fit/predict contract.

mod linear;
mod logistic;
mod svm;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dot, mean, Matrix, RngStream};
use crate::params::{ParamReader, ParamValue};

pub use logistic::{logistic_gradient, LOGISTIC_MAX_ITER, LOGISTIC_TOL};
pub use svm::{svm_objective, SVM_EPOCHS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemType {
    Regression,
    Classification,
}

impl ProblemType {
    pub fn name(self) -> &'static str {
        match self {
            ProblemType::Regression => "regression",
            ProblemType::Classification => "classification",
        }
    }
}

/// Target or prediction vector: real values or text class labels.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Continuous(Vec<f64>),
    Classes(Vec<String>),
}

impl Target {
    pub fn len(&self) -> usize {
        match self {
            Target::Continuous(v) => v.len(),
            Target::Classes(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn problem_type(&self) -> ProblemType {
        match self {
            Target::Continuous(_) => ProblemType::Regression,
            Target::Classes(_) => ProblemType::Classification,
        }
    }

    pub fn take(&self, rows: &[usize]) -> Target {
        match self {
            Target::Continuous(v) => Target::Continuous(rows.iter().map(|&i| v[i]).collect()),
            Target::Classes(v) => Target::Classes(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }

    /// Sorted distinct class labels; empty for continuous targets.
    pub fn classes(&self) -> Vec<String> {
        match self {
            Target::Continuous(_) => Vec::new(),
            Target::Classes(v) => {
                let mut c: Vec<String> = v.clone();
                c.sort();
                c.dedup();
                c
            }
        }
    }

    pub fn continuous(&self) -> Option<&[f64]> {
        match self {
            Target::Continuous(v) => Some(v),
            Target::Classes(_) => None,
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        match self {
            Target::Classes(v) => Some(v),
            Target::Continuous(_) => None,
        }
    }

    /// Real-valued view: regression values, or 0/1 codes for a binary
    /// target with the lexicographically larger class coded 1.
    pub fn numeric_view(&self) -> Result<Vec<f64>> {
        match self {
            Target::Continuous(v) => Ok(v.clone()),
            Target::Classes(v) => {
                let classes = self.classes();
                if classes.len() != 2 {
                    return Err(Error::InvalidParameter(format!(
                        "a numeric view of a classification target needs exactly 2 classes, found {}",
                        classes.len()
                    )));
                }
                Ok(v.iter().map(|c| if *c == classes[1] { 1.0 } else { 0.0 }).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Dummy,
    LinearReg,
    Ridge { lambda: f64 },
    Logistic { lambda: f64 },
    LinearSvm { c: f64, epsilon: f64 },
}

pub const MODEL_KINDS: [&str; 5] = ["dummy", "linear_reg", "ridge", "logistic", "linear_svm"];

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Dummy => "dummy",
            ModelSpec::LinearReg => "linear_reg",
            ModelSpec::Ridge { .. } => "ridge",
            ModelSpec::Logistic { .. } => "logistic",
            ModelSpec::LinearSvm { .. } => "linear_svm",
        }
    }

    pub fn is_model_kind(kind: &str) -> bool {
        MODEL_KINDS.contains(&kind)
    }

    pub fn supports(&self, problem: ProblemType) -> bool {
        match self {
            ModelSpec::Dummy | ModelSpec::LinearSvm { .. } => true,
            ModelSpec::LinearReg | ModelSpec::Ridge { .. } => problem == ProblemType::Regression,
            ModelSpec::Logistic { .. } => problem == ProblemType::Classification,
        }
    }

    /// Builds a model from scalar parameters.
    pub fn from_params(kind: &str, params: &[(String, ParamValue)]) -> Result<ModelSpec> {
        let spec = match kind {
            "dummy" => {
                ParamReader::new(kind, params, &[])?;
                ModelSpec::Dummy
            }
            "linear_reg" => {
                ParamReader::new(kind, params, &[])?;
                ModelSpec::LinearReg
            }
            "ridge" | "logistic" => {
                let r = ParamReader::new(kind, params, &["lambda"])?;
                let lambda = r.f64_or("lambda", 1.0)?;
                if lambda < 0.0 {
                    return Err(r.fail("lambda", "non-negative"));
                }
                if kind == "ridge" {
                    ModelSpec::Ridge { lambda }
                } else {
                    ModelSpec::Logistic { lambda }
                }
            }
            "linear_svm" => {
                let r = ParamReader::new(kind, params, &["c", "epsilon"])?;
                let c = r.f64_or("c", 1.0)?;
                if c <= 0.0 {
                    return Err(r.fail("c", "positive"));
                }
                let epsilon = r.f64_or("epsilon", 0.1)?;
                if epsilon < 0.0 {
                    return Err(r.fail("epsilon", "non-negative"));
                }
                ModelSpec::LinearSvm { c, epsilon }
            }
            other => return Err(Error::UnknownKind(other.to_string())),
        };
        Ok(spec)
    }
}

/// Learned state of a fitted model.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelState {
    Mean(f64),
    Majority(String),
    Linear { coef: Vec<f64>, intercept: f64 },
    /// One (weights, bias) pair for binary problems, positive class
    /// `classes[1]`; one pair per class (one-vs-rest) otherwise.
    Classifier {
        classes: Vec<String>,
        weights: Vec<(Vec<f64>, f64)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    name: &'static str,
    n_features: usize,
    state: ModelState,
}

impl FittedModel {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn predict(&self, x: &Matrix) -> Result<Target> {
        if x.cols() != self.n_features {
            return Err(Error::DimensionMismatch(format!(
                "model fitted on {} features, got {}",
                self.n_features,
                x.cols()
            )));
        }
        let n = x.rows();
        Ok(match &self.state {
            ModelState::Mean(m) => Target::Continuous(vec![*m; n]),
            ModelState::Majority(c) => Target::Classes(vec![c.clone(); n]),
            ModelState::Linear { coef, intercept } => {
                Target::Continuous((0..n).map(|i| dot(x.row(i), coef) + intercept).collect())
            }
            ModelState::Classifier { classes, weights } => Target::Classes(
                (0..n)
                    .map(|i| classes[decide(classes, weights, x.row(i))].clone())
                    .collect(),
            ),
        })
    }
}

fn decide(classes: &[String], weights: &[(Vec<f64>, f64)], row: &[f64]) -> usize {
    if classes.len() == 2 {
        let (w, b) = &weights[0];
        return usize::from(dot(row, w) + b > 0.0);
    }
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (k, (w, b)) in weights.iter().enumerate() {
        let s = dot(row, w) + b;
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    best
}

pub fn fit(spec: &ModelSpec, x: &Matrix, y: &Target, rng: &RngStream) -> Result<FittedModel> {
    let n = x.rows();
    if n == 0 || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} rows in X, {} targets",
            n,
            y.len()
        )));
    }
    if !spec.supports(y.problem_type()) {
        return Err(Error::InvalidParameter(format!(
            "model `{}` does not support {}",
            spec.name(),
            y.problem_type().name()
        )));
    }
    let state = match y {
        Target::Continuous(values) => {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput("target"));
            }
            fit_regressor(spec, x, values, rng)?
        }
        Target::Classes(labels) => fit_classifier(spec, x, labels, &y.classes(), rng)?,
    };
    Ok(FittedModel {
        name: spec.name(),
        n_features: x.cols(),
        state,
    })
}

fn fit_regressor(spec: &ModelSpec, x: &Matrix, y: &[f64], rng: &RngStream) -> Result<ModelState> {
    Ok(match *spec {
        ModelSpec::Dummy => ModelState::Mean(mean(y)),
        ModelSpec::LinearReg => {
            let (coef, intercept) = linear::fit_ols(x, y)?;
            ModelState::Linear { coef, intercept }
        }
        ModelSpec::Ridge { lambda } => {
            let (coef, intercept) = linear::fit_ridge(x, y, lambda)?;
            ModelState::Linear { coef, intercept }
        }
        ModelSpec::LinearSvm { c, epsilon } => {
            let fit = svm::pegasos(x, y, svm::Loss::EpsilonInsensitive(epsilon), c, rng.clone(), false);
            ModelState::Linear {
                coef: fit.weights,
                intercept: fit.bias,
            }
        }
        ModelSpec::Logistic { .. } => unreachable!("checked by supports"),
    })
}

fn fit_classifier(
    spec: &ModelSpec,
    x: &Matrix,
    labels: &[String],
    classes: &[String],
    rng: &RngStream,
) -> Result<ModelState> {
    if classes.len() < 2 {
        return Err(Error::SingleClass(classes.first().cloned().unwrap_or_default()));
    }
    if let ModelSpec::Dummy = spec {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for l in labels {
            *counts.entry(l).or_default() += 1;
        }
        // BTreeMap iterates in label order, so the first maximum wins ties.
        let mut best = ("", 0);
        for (label, count) in counts {
            if count > best.1 {
                best = (label, count);
            }
        }
        return Ok(ModelState::Majority(best.0.to_string()));
    }
    let positives: Vec<usize> = if classes.len() == 2 { vec![1] } else { (0..classes.len()).collect() };
    let mut weights = Vec::with_capacity(positives.len());
    for &k in &positives {
        let target: Vec<f64> = labels
            .iter()
            .map(|l| if *l == classes[k] { 1.0 } else { 0.0 })
            .collect();
        let pair = match *spec {
            ModelSpec::Logistic { lambda } => {
                let fit = logistic::fit_binary(x, &target, lambda);
                (fit.weights, fit.bias)
            }
            ModelSpec::LinearSvm { c, .. } => {
                let signed: Vec<f64> = target.iter().map(|t| 2.0 * t - 1.0).collect();
                let fit = svm::pegasos(x, &signed, svm::Loss::Hinge, c, rng.split(k as u64), false);
                (fit.weights, fit.bias)
            }
            _ => unreachable!("checked by supports"),
        };
        weights.push(pair);
    }
    Ok(ModelState::Classifier {
        classes: classes.to_vec(),
        weights,
    })
}

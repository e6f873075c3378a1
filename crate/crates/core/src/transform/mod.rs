//! Feature transformers. Every transformer learns its state from training
//! rows only; `apply` reuses that frozen state on any table.

mod cbpm;
mod confound;
mod pca;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Target;
use crate::numerics::{mean, std_dev, variance, LeastSquares, Matrix};
use crate::params::{ParamReader, ParamValue};
use crate::table::{resolve_selector, Column, ColumnSelector, FeatureTypeMap, Table, CONFOUND, CONTINUOUS};

pub use cbpm::CBPM_EMPTY;

/// Standard deviations below this map a column to zeros.
pub const ZSCORE_MIN_STD: f64 = 1e-12;

pub const TRANSFORMER_KINDS: [&str; 5] = ["zscore", "variance_threshold", "pca", "confound_remover", "cbpm"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Retain {
    /// Smallest number of components whose eigenvalues reach this share of
    /// the total variance; exactly 1.0 keeps every non-null component.
    Fraction(f64),
    Count(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    Positive,
    Negative,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Sum,
    Mean,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CbpmParams {
    pub alpha: f64,
    pub sign_mode: SignMode,
    pub aggregation: Aggregation,
}

impl Default for CbpmParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            sign_mode: SignMode::Both,
            aggregation: Aggregation::Sum,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfoundRemoverParams {
    pub confounds: ColumnSelector,
    /// Fit the regressions only on rows whose `column` equals `value`.
    pub subgroup: Option<(String, String)>,
    pub include_intercept: bool,
}

impl Default for ConfoundRemoverParams {
    fn default() -> Self {
        Self {
            confounds: ColumnSelector::by_type(CONFOUND),
            subgroup: None,
            include_intercept: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformerKind {
    Zscore,
    VarianceThreshold { threshold: f64 },
    Pca { retain: Retain },
    ConfoundRemover(ConfoundRemoverParams),
    Cbpm(CbpmParams),
}

impl TransformerKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransformerKind::Zscore => "zscore",
            TransformerKind::VarianceThreshold { .. } => "variance_threshold",
            TransformerKind::Pca { .. } => "pca",
            TransformerKind::ConfoundRemover(_) => "confound_remover",
            TransformerKind::Cbpm(_) => "cbpm",
        }
    }

    pub fn is_transformer_kind(kind: &str) -> bool {
        TRANSFORMER_KINDS.contains(&kind)
    }

    /// Builds a transformer from scalar parameters.
    pub fn from_params(kind: &str, params: &[(String, ParamValue)]) -> Result<Self> {
        Ok(match kind {
            "zscore" => {
                ParamReader::new(kind, params, &[])?;
                TransformerKind::Zscore
            }
            "variance_threshold" => {
                let r = ParamReader::new(kind, params, &["threshold"])?;
                let threshold = r.f64_or("threshold", 0.0)?;
                if threshold < 0.0 {
                    return Err(r.fail("threshold", "non-negative"));
                }
                TransformerKind::VarianceThreshold { threshold }
            }
            "pca" => {
                let r = ParamReader::new(kind, params, &["retain"])?;
                let want = "a variance fraction in (0, 1] or a positive component count";
                let retain = match r.get("retain") {
                    None => Retain::Fraction(1.0),
                    Some(ParamValue::Int(k)) if *k >= 1 => Retain::Count(*k as usize),
                    Some(ParamValue::Float(f)) if *f > 0.0 && *f <= 1.0 => Retain::Fraction(*f),
                    Some(ParamValue::Float(f)) if *f > 1.0 && f.fract() == 0.0 && f.is_finite() => {
                        Retain::Count(*f as usize)
                    }
                    Some(_) => return Err(r.fail("retain", want)),
                };
                TransformerKind::Pca { retain }
            }
            "confound_remover" => {
                let r = ParamReader::new(
                    kind,
                    params,
                    &["confounds", "subgroup_column", "subgroup_value", "intercept"],
                )?;
                let confounds = ColumnSelector::parse(r.text_or("confounds", CONFOUND)?);
                let subgroup = match (r.opt_text("subgroup_column")?, r.get("subgroup_value")) {
                    (None, None) => None,
                    (Some(col), Some(value)) => {
                        if let ParamValue::Float(_) | ParamValue::Bool(_) = value {
                            return Err(r.fail("subgroup_value", "a string or integer label"));
                        }
                        Some((col.to_string(), value.to_string()))
                    }
                    (Some(_), None) => return Err(r.fail("subgroup_value", "set with subgroup_column")),
                    (None, Some(_)) => return Err(r.fail("subgroup_column", "set with subgroup_value")),
                };
                TransformerKind::ConfoundRemover(ConfoundRemoverParams {
                    confounds,
                    subgroup,
                    include_intercept: r.bool_or("intercept", true)?,
                })
            }
            "cbpm" => {
                let r = ParamReader::new(kind, params, &["alpha", "sign", "aggregation"])?;
                let alpha = r.f64_or("alpha", 0.01)?;
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(r.fail("alpha", "in (0, 1)"));
                }
                let sign_mode = match r.text_or("sign", "both")? {
                    "both" => SignMode::Both,
                    "positive" => SignMode::Positive,
                    "negative" => SignMode::Negative,
                    _ => return Err(r.fail("sign", "one of positive, negative, both")),
                };
                let aggregation = match r.text_or("aggregation", "sum")? {
                    "sum" => Aggregation::Sum,
                    "mean" => Aggregation::Mean,
                    _ => return Err(r.fail("aggregation", "one of sum, mean")),
                };
                TransformerKind::Cbpm(CbpmParams {
                    alpha,
                    sign_mode,
                    aggregation,
                })
            }
            other => return Err(Error::UnknownKind(other.to_string())),
        })
    }

    /// Every transformer reads its selection from `continuous` features
    /// unless told otherwise.
    pub fn default_selector() -> ColumnSelector {
        ColumnSelector::by_type(CONTINUOUS)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformerSpec {
    pub kind: TransformerKind,
    pub apply_to: ColumnSelector,
}

/// Result of fitting a transformer on training rows.
#[derive(Clone, Debug)]
pub struct Fitted {
    pub transformer: FittedTransformer,
    /// The training table after applying the fitted state.
    pub table: Table,
    pub types: FeatureTypeMap,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformState {
    Zscore {
        means: Vec<f64>,
        stds: Vec<f64>,
    },
    VarianceThreshold {
        threshold: f64,
        variances: Vec<f64>,
        kept: Vec<String>,
    },
    Pca {
        means: Vec<f64>,
        /// p x k, one eigenvector per column.
        components: Matrix,
        eigenvalues: Vec<f64>,
        outputs: Vec<String>,
    },
    ConfoundRemover {
        confounds: Vec<String>,
        /// One regression of each input feature on the confounds.
        fits: Vec<LeastSquares>,
        subgroup: Option<(String, String)>,
        n_fit_rows: usize,
    },
    Cbpm {
        params: CbpmParams,
        positive: Vec<String>,
        negative: Vec<String>,
        /// Correlation of every input with the target on the fitting rows;
        /// `None` for inputs constant on those rows.
        correlations: Vec<Option<f64>>,
        outputs: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedTransformer {
    kind: &'static str,
    inputs: Vec<String>,
    state: TransformState,
    warnings: Vec<String>,
}

impl FittedTransformer {
    pub fn kind(&self) -> &'static str {
        self.kind
    }

    /// Columns consumed at fit time, in table order.
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn state(&self) -> &TransformState {
        &self.state
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn apply(&self, table: &Table) -> Result<Table> {
        match &self.state {
            TransformState::Zscore { means, stds } => {
                let mut out = Vec::with_capacity(self.inputs.len());
                for (k, name) in self.inputs.iter().enumerate() {
                    let v = table.numeric(name)?;
                    let col = if stds[k] < ZSCORE_MIN_STD {
                        vec![0.0; v.len()]
                    } else {
                        v.iter().map(|x| (x - means[k]) / stds[k]).collect()
                    };
                    out.push((name.clone(), Column::Numeric(col)));
                }
                table.with_replaced(out)
            }
            TransformState::VarianceThreshold { kept, .. } => {
                for name in &self.inputs {
                    table.numeric(name)?;
                }
                let dropped: Vec<String> = self.inputs.iter().filter(|c| !kept.contains(c)).cloned().collect();
                table.with_columns_swapped(&dropped, Vec::new())
            }
            TransformState::Pca {
                means,
                components,
                outputs,
                ..
            } => pca::apply(table, &self.inputs, means, components, outputs),
            TransformState::ConfoundRemover { confounds, fits, .. } => {
                confound::apply(table, &self.inputs, confounds, fits)
            }
            TransformState::Cbpm {
                params,
                positive,
                negative,
                outputs,
                ..
            } => cbpm::apply(table, &self.inputs, params, positive, negative, outputs),
        }
    }
}

fn numeric_inputs<'a>(table: &'a Table, names: &[String]) -> Result<Vec<&'a [f64]>> {
    names.iter().map(|n| table.numeric(n)).collect()
}

impl TransformerSpec {
    pub fn new(kind: TransformerKind, apply_to: ColumnSelector) -> Self {
        Self { kind, apply_to }
    }

    /// Learns state from `train` and returns it with the transformed
    /// training table and the updated type map.
    pub fn fit_apply(&self, train: &Table, types: &FeatureTypeMap, target: &Target) -> Result<Fitted> {
        let inputs = resolve_selector(&self.apply_to, train, types)?;
        let mut warnings = Vec::new();
        let (state, types_after) = match &self.kind {
            TransformerKind::Zscore => {
                let cols = numeric_inputs(train, &inputs)?;
                let means = cols.iter().map(|c| mean(c)).collect();
                let stds = cols.iter().map(|c| std_dev(c)).collect();
                (TransformState::Zscore { means, stds }, types.clone())
            }
            TransformerKind::VarianceThreshold { threshold } => {
                let cols = numeric_inputs(train, &inputs)?;
                let variances: Vec<f64> = cols.iter().map(|c| variance(c)).collect();
                let kept: Vec<String> = inputs
                    .iter()
                    .zip(&variances)
                    .filter(|(_, v)| **v > *threshold)
                    .map(|(n, _)| n.clone())
                    .collect();
                if kept.is_empty() {
                    return Err(Error::NoFeaturesRemain);
                }
                let dropped: Vec<String> = inputs.iter().filter(|c| !kept.contains(c)).cloned().collect();
                let state = TransformState::VarianceThreshold {
                    threshold: *threshold,
                    variances,
                    kept,
                };
                (state, types.without(&dropped))
            }
            TransformerKind::Pca { retain } => {
                let state = pca::fit(train, &inputs, *retain)?;
                (state, types.without(&inputs))
            }
            TransformerKind::ConfoundRemover(params) => {
                let state = confound::fit(train, types, &inputs, params)?;
                let confounds = match &state {
                    TransformState::ConfoundRemover { confounds, .. } => confounds.clone(),
                    _ => unreachable!(),
                };
                (state, types.retagged(&confounds, crate::table::REMOVED_CONFOUND))
            }
            TransformerKind::Cbpm(params) => {
                let y = target.numeric_view()?;
                let state = cbpm::fit(train, &inputs, &y, params, &mut warnings)?;
                (state, types.without(&inputs))
            }
        };
        let transformer = FittedTransformer {
            kind: self.kind.name(),
            inputs,
            state,
            warnings,
        };
        let table = transformer.apply(train)?;
        Ok(Fitted {
            transformer,
            table,
            types: types_after,
        })
    }
}

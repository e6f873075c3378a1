//! The result file written by `run` (schema version 1).
//!
//! Training indices are stored as a SHA-256 digest of their ascending
//! decimal rendering joined by `,`; every supported scheme trains on the
//! complement of the test rows, so they are reconstructible from
//! `test_idx` and `n_samples` and verified against the digest on load.

use std::collections::HashMap;
use std::path::Path;

use cvforge::cv::{CvResult, FoldParams, FoldTuning, MetricSummary, PredictionRecord};
use cvforge::inspect::summarize;
use cvforge::score::Metric;
use cvforge::stats::FoldScore;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, EXIT_DATA};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldEntry {
    pub repeat: usize,
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub train_idx_hash: String,
    pub test_idx: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreEntry {
    pub repeat: usize,
    pub fold: usize,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldFitted {
    pub repeat: usize,
    pub fold: usize,
    /// Step name to summary, in pipeline order.
    pub steps: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDoc {
    pub schema_version: u32,
    pub config_echo: Value,
    pub problem_type: String,
    pub n_samples: usize,
    pub fold_plan: Vec<FoldEntry>,
    pub scores: Vec<ScoreEntry>,
    pub summary: Vec<MetricSummary>,
    pub chosen_params: Vec<FoldParams>,
    /// Inner grid-search tables, for folds that searched.
    pub tuning: Vec<FoldTuning>,
    pub predictions: Vec<PredictionRecord>,
    pub warnings: Vec<String>,
    /// Present only when fitted pipelines were retained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_params: Option<Vec<FoldFitted>>,
}

pub fn index_hash(indices: &[usize]) -> String {
    let text = indices.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl ResultDoc {
    pub fn from_result(result: &CvResult, config_echo: Value) -> Self {
        let fold_plan = result
            .plan
            .folds
            .iter()
            .map(|f| FoldEntry {
                repeat: f.repeat,
                fold: f.fold,
                n_train: f.train.len(),
                n_test: f.test.len(),
                train_idx_hash: index_hash(&f.train),
                test_idx: f.test.clone(),
            })
            .collect();
        let fitted_params = result.pipelines.as_ref().map(|pipelines| {
            result
                .plan
                .folds
                .iter()
                .zip(pipelines)
                .map(|(f, fp)| FoldFitted {
                    repeat: f.repeat,
                    fold: f.fold,
                    steps: serde_json::to_value(summarize(fp)).expect("summaries serialize"),
                })
                .collect()
        });
        Self {
            schema_version: SCHEMA_VERSION,
            config_echo,
            problem_type: result.problem_type.name().to_string(),
            n_samples: result.plan.n,
            fold_plan,
            scores: result
                .scores
                .iter()
                .map(|s| ScoreEntry {
                    repeat: s.repeat,
                    fold: s.fold,
                    metric: s.metric,
                    value: s.value,
                })
                .collect(),
            summary: result.summary.clone(),
            chosen_params: result.chosen_params.clone(),
            tuning: result.tuning.clone(),
            predictions: result.predictions.clone(),
            warnings: result.warnings.clone(),
            fitted_params,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let doc: ResultDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                doc.schema_version
            ));
        }
        doc.verify()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(EXIT_DATA, format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::new(EXIT_DATA, format!("{}: {e}", path.display())))
    }

    /// Training rows of a fold: the complement of its test rows.
    pub fn train_indices(&self, entry: &FoldEntry) -> Vec<usize> {
        let mut is_test = vec![false; self.n_samples];
        for &i in &entry.test_idx {
            is_test[i] = true;
        }
        (0..self.n_samples).filter(|&i| !is_test[i]).collect()
    }

    fn verify(&self) -> Result<(), String> {
        for e in &self.fold_plan {
            if e.test_idx.iter().any(|&i| i >= self.n_samples) || e.test_idx.len() != e.n_test {
                return Err(format!("fold {}:{} has inconsistent test indices", e.repeat, e.fold));
            }
            let train = self.train_indices(e);
            if train.len() != e.n_train || index_hash(&train) != e.train_idx_hash {
                return Err(format!("fold {}:{} training indices do not match their digest", e.repeat, e.fold));
            }
        }
        Ok(())
    }

    pub fn metrics(&self) -> Vec<Metric> {
        let mut out: Vec<Metric> = Vec::new();
        for s in &self.scores {
            if !out.contains(&s.metric) {
                out.push(s.metric);
            }
        }
        out
    }

    /// Fold scores for one metric joined with fold sizes, in plan order.
    pub fn fold_scores(&self, metric: Metric) -> Option<Vec<FoldScore>> {
        let sizes: HashMap<(usize, usize), (usize, usize)> = self
            .fold_plan
            .iter()
            .map(|e| ((e.repeat, e.fold), (e.n_train, e.n_test)))
            .collect();
        let out: Vec<FoldScore> = self
            .scores
            .iter()
            .filter(|s| s.metric == metric)
            .filter_map(|s| {
                let (n_train, n_test) = *sizes.get(&(s.repeat, s.fold))?;
                Some(FoldScore {
                    repeat: s.repeat,
                    fold: s.fold,
                    n_train,
                    n_test,
                    value: s.value,
                })
            })
            .collect();
        (!out.is_empty()).then_some(out)
    }

    pub fn has_fold(&self, repeat: usize, fold: usize) -> bool {
        self.fold_plan.iter().any(|e| e.repeat == repeat && e.fold == fold)
    }

    pub fn plan_shape(&self) -> String {
        let repeats = self.fold_plan.iter().map(|e| e.repeat + 1).max().unwrap_or(0);
        let folds = self.fold_plan.iter().filter(|e| e.repeat == 0).count();
        format!("{repeats} repeat(s) of {folds} folds")
    }
}

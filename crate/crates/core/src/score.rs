//! Scoring metrics, all oriented so that higher is better.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ProblemType, Target};
use crate::numerics::{mean, pearson_r};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    NegMeanAbsoluteError,
    NegMeanSquaredError,
    R2,
    PearsonRScore,
    Accuracy,
    BalancedAccuracy,
}

pub const METRICS: [Metric; 6] = [
    Metric::NegMeanAbsoluteError,
    Metric::NegMeanSquaredError,
    Metric::R2,
    Metric::PearsonRScore,
    Metric::Accuracy,
    Metric::BalancedAccuracy,
];

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::NegMeanAbsoluteError => "neg_mean_absolute_error",
            Metric::NegMeanSquaredError => "neg_mean_squared_error",
            Metric::R2 => "r2",
            Metric::PearsonRScore => "pearson_r_score",
            Metric::Accuracy => "accuracy",
            Metric::BalancedAccuracy => "balanced_accuracy",
        }
    }

    pub fn problem_type(self) -> ProblemType {
        match self {
            Metric::Accuracy | Metric::BalancedAccuracy => ProblemType::Classification,
            _ => ProblemType::Regression,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        METRICS
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Metric(format!("unknown metric `{s}`")))
    }
}

/// Scores predictions against the truth.
///
/// `pearson_r_score` is 0 when the predictions are constant (no linear
/// association can be expressed), and an error when the truth is constant.
pub fn score(metric: Metric, y_true: &Target, y_pred: &Target) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Metric(format!(
            "{} true values but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::Metric(format!("{metric} on zero samples")));
    }
    match (y_true, y_pred) {
        (Target::Continuous(t), Target::Continuous(p)) if metric.problem_type() == ProblemType::Regression => {
            regression(metric, t, p)
        }
        (Target::Classes(t), Target::Classes(p)) if metric.problem_type() == ProblemType::Classification => {
            Ok(classification(metric, t, p))
        }
        _ => Err(Error::Metric(format!(
            "`{metric}` is not defined for {} targets",
            y_true.problem_type().name()
        ))),
    }
}

fn regression(metric: Metric, t: &[f64], p: &[f64]) -> Result<f64> {
    let n = t.len() as f64;
    Ok(match metric {
        Metric::NegMeanAbsoluteError => -t.iter().zip(p).map(|(a, b)| (a - b).abs()).sum::<f64>() / n,
        Metric::NegMeanSquaredError => -t.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n,
        Metric::R2 => {
            if t.len() < 2 {
                return Err(Error::Metric("r2 needs at least 2 samples".into()));
            }
            let m = mean(t);
            let ss_tot: f64 = t.iter().map(|a| (a - m).powi(2)).sum();
            if ss_tot == 0.0 {
                return Err(Error::Metric("r2 is undefined for a constant target".into()));
            }
            let ss_res: f64 = t.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum();
            1.0 - ss_res / ss_tot
        }
        Metric::PearsonRScore => {
            if t.len() < 3 {
                return Err(Error::Metric("pearson_r_score needs at least 3 samples".into()));
            }
            if t.iter().all(|v| *v == t[0]) {
                return Err(Error::Metric("pearson_r_score is undefined for a constant target".into()));
            }
            if p.iter().all(|v| *v == p[0]) {
                return Ok(0.0);
            }
            pearson_r(t, p)?
        }
        _ => unreachable!("classification metric"),
    })
}

fn classification(metric: Metric, t: &[String], p: &[String]) -> f64 {
    match metric {
        Metric::Accuracy => t.iter().zip(p).filter(|(a, b)| a == b).count() as f64 / t.len() as f64,
        Metric::BalancedAccuracy => {
            let mut per_class: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
            for (a, b) in t.iter().zip(p) {
                let e = per_class.entry(a).or_default();
                e.1 += 1;
                if a == b {
                    e.0 += 1;
                }
            }
            let recalls: f64 = per_class.values().map(|(hit, total)| *hit as f64 / *total as f64).sum();
            recalls / per_class.len() as f64
        }
        _ => unreachable!("regression metric"),
    }
}

//! Pipeline comparison on shared fold plans.

use serde::{Deserialize, Serialize};

use crate::cv::CvResult;
use crate::error::{Error, Result};
use crate::numerics::{mean, t_sf, variance};
use crate::score::Metric;

/// One fold's score together with the fold sizes it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub repeat: usize,
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Infinite (signed) when `degenerate`.
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p: f64,
    pub mean_diff: f64,
    pub k: usize,
    /// Variance inflation `1/k + n_test/n_train`.
    pub correction: f64,
    /// All differences equal and non-zero: no variance to test against.
    pub degenerate: bool,
}

/// Corrected resampled t-test on paired differences `d`, with
/// `t = mean(d) / sqrt((1/k + ratio) var(d))`, `df = k - 1`, where `ratio` is
/// the test-to-train size ratio.
pub fn corrected_ttest_diffs(d: &[f64], test_train_ratio: f64) -> Result<TestResult> {
    let k = d.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("corrected t-test needs at least 2 folds, got {k}")));
    }
    if !(test_train_ratio.is_finite() && test_train_ratio >= 0.0) {
        return Err(Error::InvalidParameter(format!("test/train ratio {test_train_ratio}")));
    }
    let m = mean(d);
    let v = variance(d);
    let correction = 1.0 / k as f64 + test_train_ratio;
    let df = (k - 1) as f64;
    // Identical differences have zero variance even where rounding in the
    // two-pass variance leaves a residue.
    let (t, p, degenerate) = if d.iter().all(|x| *x == d[0]) {
        if m == 0.0 {
            (0.0, 1.0, false)
        } else {
            (m.signum() * f64::INFINITY, 0.0, true)
        }
    } else {
        let t = m / (correction * v).sqrt();
        (t, (2.0 * t_sf(t.abs(), df)?).min(1.0), false)
    };
    Ok(TestResult {
        t,
        df,
        p,
        mean_diff: m,
        k,
        correction,
        degenerate,
    })
}

/// Corrected t-test of `a - b`; both must list the same folds with the same
/// sizes. The ratio uses mean test and mean train sizes.
pub fn corrected_ttest_scores(a: &[FoldScore], b: &[FoldScore]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::FoldPlanMismatch(format!("{} folds against {}", a.len(), b.len())));
    }
    for (x, y) in a.iter().zip(b) {
        if (x.repeat, x.fold, x.n_train, x.n_test) != (y.repeat, y.fold, y.n_train, y.n_test) {
            return Err(Error::FoldPlanMismatch(format!(
                "repeat {} fold {} ({}/{}) against repeat {} fold {} ({}/{})",
                x.repeat, x.fold, x.n_train, x.n_test, y.repeat, y.fold, y.n_train, y.n_test
            )));
        }
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.value - y.value).collect();
    let n_test = a.iter().map(|f| f.n_test as f64).sum::<f64>();
    let n_train = a.iter().map(|f| f.n_train as f64).sum::<f64>();
    if n_train == 0.0 {
        return Err(Error::InvalidParameter("empty training folds".into()));
    }
    corrected_ttest_diffs(&d, n_test / n_train)
}

/// Fold scores of one metric, in plan order.
pub fn fold_scores(result: &CvResult, metric: Metric) -> Result<Vec<FoldScore>> {
    let out: Vec<FoldScore> = result
        .scores
        .iter()
        .filter(|s| s.metric == metric)
        .map(|s| FoldScore {
            repeat: s.repeat,
            fold: s.fold,
            n_train: s.n_train,
            n_test: s.n_test,
            value: s.value,
        })
        .collect();
    if out.is_empty() {
        return Err(Error::Metric(format!("metric `{metric}` is absent from the result")));
    }
    Ok(out)
}

/// Corrected t-test between two results that share one fold plan.
pub fn corrected_ttest(a: &CvResult, b: &CvResult, metric: Metric) -> Result<TestResult> {
    if a.plan != b.plan {
        return Err(Error::FoldPlanMismatch("the results were produced on different fold plans".into()));
    }
    corrected_ttest_scores(&fold_scores(a, metric)?, &fold_scores(b, metric)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub name_a: String,
    pub name_b: String,
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub degenerate: bool,
}

/// Long-format fold score, one row per model and fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldScoreRow {
    pub model: String,
    pub repeat: usize,
    pub fold: usize,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: Metric,
    pub pairs: Vec<PairRow>,
    pub fold_scores: Vec<FoldScoreRow>,
}

/// All unordered pairs in input order (`(0,1), (0,2), ..., (1,2), ...`),
/// plus the long-format fold scores. No multiple-comparison adjustment.
pub fn compare_fold_scores(named: &[(String, Vec<FoldScore>)], metric: Metric) -> Result<Comparison> {
    if named.len() < 2 {
        return Err(Error::InvalidParameter(format!("comparison needs at least 2 results, got {}", named.len())));
    }
    let mut pairs = Vec::new();
    for i in 0..named.len() {
        for j in (i + 1)..named.len() {
            let (na, a) = &named[i];
            let (nb, b) = &named[j];
            let r = corrected_ttest_scores(a, b)?;
            let values = |s: &[FoldScore]| s.iter().map(|f| f.value).collect::<Vec<_>>();
            pairs.push(PairRow {
                name_a: na.clone(),
                name_b: nb.clone(),
                t: r.t,
                df: r.df,
                p: r.p,
                mean_a: mean(&values(a)),
                mean_b: mean(&values(b)),
                degenerate: r.degenerate,
            });
        }
    }
    let fold_scores = named
        .iter()
        .flat_map(|(name, scores)| {
            scores.iter().map(move |s| FoldScoreRow {
                model: name.clone(),
                repeat: s.repeat,
                fold: s.fold,
                metric,
                value: s.value,
            })
        })
        .collect();
    Ok(Comparison {
        metric,
        pairs,
        fold_scores,
    })
}

pub fn compare_all(results: &[(&str, &CvResult)], metric: Metric) -> Result<Comparison> {
    if let Some((first, rest)) = results.split_first() {
        if let Some((name, _)) = rest.iter().find(|(_, r)| r.plan != first.1.plan) {
            return Err(Error::FoldPlanMismatch(format!(
                "`{name}` was produced on a different fold plan than `{}`",
                first.0
            )));
        }
    }
    let named = results
        .iter()
        .map(|(n, r)| Ok((n.to_string(), fold_scores(r, metric)?)))
        .collect::<Result<Vec<_>>>()?;
    compare_fold_scores(&named, metric)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Two-sample t-test without the equal-variance assumption
/// (Welch-Satterthwaite degrees of freedom), two-sided.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "welch t-test needs at least 2 values per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    if va + vb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let t = (mean(a) - mean(b)) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(WelchResult {
        t,
        df,
        p: (2.0 * t_sf(t.abs(), df)?).min(1.0),
    })
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Splitting strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CvScheme {
    /// Contiguous folds over the (optionally shuffled) row order; the first
    /// `n % k` folds are one row larger.
    Kfold {
        k: usize,
        #[serde(default)]
        shuffle: bool,
    },
    /// K-fold reshuffled independently for every repeat.
    RepeatedKfold { k: usize, repeats: usize },
    /// Per class, members are dealt round-robin over the folds with one
    /// cursor shared across classes (classes in sorted order).
    StratifiedKfold {
        k: usize,
        #[serde(default)]
        shuffle: bool,
    },
    /// Groups, largest first, each go to the currently smallest fold.
    GroupKfold { k: usize, group: String },
    LeaveOneOut,
}

impl CvScheme {
    pub fn name(&self) -> &'static str {
        match self {
            CvScheme::Kfold { .. } => "kfold",
            CvScheme::RepeatedKfold { .. } => "repeated_kfold",
            CvScheme::StratifiedKfold { .. } => "stratified_kfold",
            CvScheme::GroupKfold { .. } => "group_kfold",
            CvScheme::LeaveOneOut => "leave_one_out",
        }
    }

    pub fn group_column(&self) -> Option<&str> {
        match self {
            CvScheme::GroupKfold { group, .. } => Some(group),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub repeat: usize,
    pub fold: usize,
    /// Ascending row indices.
    pub train: Vec<usize>,
    /// Ascending row indices.
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n: usize,
    /// Ordered by repeat, then fold.
    pub folds: Vec<Fold>,
}

impl FoldPlan {
    pub fn n_repeats(&self) -> usize {
        self.folds.iter().map(|f| f.repeat + 1).max().unwrap_or(0)
    }

    pub fn get(&self, repeat: usize, fold: usize) -> Option<&Fold> {
        self.folds.iter().find(|f| f.repeat == repeat && f.fold == fold)
    }

    fn from_assignment(n: usize, repeat: usize, k: usize, assign: &[usize], folds: &mut Vec<Fold>) {
        for f in 0..k {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| assign[i] == f);
            folds.push(Fold {
                repeat,
                fold: f,
                train,
                test,
            });
        }
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Scheme(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::Scheme(format!("k = {k} exceeds the {n} available rows")));
    }
    Ok(())
}

fn kfold_assignment(n: usize, k: usize, order: &[usize]) -> Vec<usize> {
    let base = n / k;
    let extra = n % k;
    let mut assign = vec![0; n];
    let mut pos = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        for &i in &order[pos..pos + size] {
            assign[i] = f;
        }
        pos += size;
    }
    assign
}

/// Builds the fold plan for `n` rows. `y` holds class labels (needed for
/// stratification), `groups` the group labels (needed for group k-fold).
pub fn make_splits(
    scheme: &CvScheme,
    n: usize,
    y: Option<&[String]>,
    groups: Option<&[String]>,
    rng: &RngStream,
) -> Result<FoldPlan> {
    let mut folds = Vec::new();
    match scheme {
        CvScheme::Kfold { k, shuffle } => {
            check_k(*k, n)?;
            let mut order: Vec<usize> = (0..n).collect();
            if *shuffle {
                rng.split(0).shuffle(&mut order);
            }
            FoldPlan::from_assignment(n, 0, *k, &kfold_assignment(n, *k, &order), &mut folds);
        }
        CvScheme::RepeatedKfold { k, repeats } => {
            check_k(*k, n)?;
            if *repeats < 1 {
                return Err(Error::Scheme("repeats must be at least 1".into()));
            }
            for r in 0..*repeats {
                let mut order: Vec<usize> = (0..n).collect();
                rng.split(r as u64).shuffle(&mut order);
                FoldPlan::from_assignment(n, r, *k, &kfold_assignment(n, *k, &order), &mut folds);
            }
        }
        CvScheme::StratifiedKfold { k, shuffle } => {
            check_k(*k, n)?;
            let y = y.ok_or_else(|| Error::Scheme("stratified_kfold needs a categorical target".into()))?;
            if y.len() != n {
                return Err(Error::DimensionMismatch(format!("{} labels for {n} rows", y.len())));
            }
            let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, label) in y.iter().enumerate() {
                by_class.entry(label).or_default().push(i);
            }
            let mut stream = rng.split(0);
            let mut assign = vec![0; n];
            let mut cursor = 0;
            for (label, members) in by_class.iter_mut() {
                if members.len() < *k {
                    return Err(Error::Scheme(format!(
                        "class `{label}` has {} members, fewer than k = {k}",
                        members.len()
                    )));
                }
                if *shuffle {
                    stream.shuffle(members);
                }
                for &i in members.iter() {
                    assign[i] = cursor % k;
                    cursor += 1;
                }
            }
            FoldPlan::from_assignment(n, 0, *k, &assign, &mut folds);
        }
        CvScheme::GroupKfold { k, group } => {
            check_k(*k, n)?;
            let groups = groups.ok_or_else(|| Error::Scheme(format!("group_kfold needs group column `{group}`")))?;
            if groups.len() != n {
                return Err(Error::DimensionMismatch(format!("{} group labels for {n} rows", groups.len())));
            }
            let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, g) in groups.iter().enumerate() {
                members.entry(g).or_default().push(i);
            }
            if members.len() < *k {
                return Err(Error::Scheme(format!(
                    "{} distinct groups in `{group}`, fewer than k = {k}",
                    members.len()
                )));
            }
            let mut ordered: Vec<(&str, Vec<usize>)> = members.into_iter().collect();
            // Stable sort keeps label order among equally sized groups.
            ordered.sort_by_key(|g| std::cmp::Reverse(g.1.len()));
            let mut sizes = vec![0usize; *k];
            let mut assign = vec![0; n];
            for (_, rows) in &ordered {
                let f = (0..*k).min_by_key(|&f| (sizes[f], f)).expect("k >= 2");
                sizes[f] += rows.len();
                for &i in rows {
                    assign[i] = f;
                }
            }
            FoldPlan::from_assignment(n, 0, *k, &assign, &mut folds);
        }
        CvScheme::LeaveOneOut => {
            if n < 2 {
                return Err(Error::Scheme(format!("leave_one_out needs at least 2 rows, got {n}")));
            }
            let assign: Vec<usize> = (0..n).collect();
            FoldPlan::from_assignment(n, 0, n, &assign, &mut folds);
        }
    }
    Ok(FoldPlan { n, folds })
}

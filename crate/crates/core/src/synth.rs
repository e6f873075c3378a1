//! Seeded synthetic datasets with known structure, used for benchmarks,
//! acceptance checks and demos.

use crate::numerics::RngStream;
use crate::table::{Column, Table};

/// Feature names `f000, f001, ...`, zero-padded to the width of `p - 1`.
pub fn feature_names(p: usize) -> Vec<String> {
    let width = p.saturating_sub(1).to_string().len().max(3);
    (0..p).map(|j| format!("f{j:0width$}")).collect()
}

fn gaussian_columns(n: usize, p: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    (0..p).map(|_| (0..n).map(|_| rng.normal()).collect()).collect()
}

/// Balanced labels in random order; `n` odd gives the extra row to `first`.
fn balanced_labels(n: usize, first: &str, second: &str, rng: &mut RngStream) -> Vec<String> {
    let mut labels: Vec<String> = (0..n)
        .map(|i| if i < n.div_ceil(2) { first } else { second }.to_string())
        .collect();
    rng.shuffle(&mut labels);
    labels
}

fn assemble(names: Vec<String>, columns: Vec<Vec<f64>>, extra: Vec<(String, Column)>) -> Table {
    let mut cols: Vec<(String, Column)> = names.into_iter().zip(columns).map(|(n, c)| (n, Column::Numeric(c))).collect();
    cols.extend(extra);
    Table::new(cols).expect("generated columns are consistent")
}

/// Independent standard-normal features and a balanced `"0"`/`"1"` target `y`
/// unrelated to them.
pub fn null_classification(n: usize, p: usize, seed: u64) -> Table {
    let root = RngStream::new(seed, 0);
    let x = gaussian_columns(n, p, &mut root.split(0));
    let y = balanced_labels(n, "0", "1", &mut root.split(1));
    assemble(feature_names(p), x, vec![("y".into(), Column::Categorical(y))])
}

/// A continuous target `y ~ N(0, 1)` and `p` features of unit variance; the
/// first `informative` of them correlate with `y` at `loading` (positively),
/// the rest are noise.
pub fn planted_network(n: usize, p: usize, informative: usize, loading: f64, seed: u64) -> Table {
    assert!(informative <= p && (0.0..1.0).contains(&loading));
    let root = RngStream::new(seed, 0);
    let mut r = root.split(0);
    let y: Vec<f64> = (0..n).map(|_| r.normal()).collect();
    let noise_scale = (1.0 - loading * loading).sqrt();
    let mut noise = root.split(1);
    let x: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let l = if j < informative { loading } else { 0.0 };
            let s = if j < informative { noise_scale } else { 1.0 };
            y.iter().map(|v| l * v + s * noise.normal()).collect()
        })
        .collect();
    assemble(feature_names(p), x, vec![("y".into(), Column::Numeric(y))])
}

/// Diagnosis `dx` (`control`/`patient`, balanced) and a standardized `age`
/// independent of it; every feature is `effect * [patient] + 2 * age +
/// noise_sd * N(0, 1)`, so age pushes all features the same way the
/// diagnosis does.
pub fn confounded_diagnosis(n: usize, p: usize, effect: f64, noise_sd: f64, seed: u64) -> Table {
    let root = RngStream::new(seed, 0);
    let dx = balanced_labels(n, "control", "patient", &mut root.split(0));
    let mut a = root.split(1);
    let age: Vec<f64> = (0..n).map(|_| a.normal()).collect();
    let mut noise = root.split(2);
    let x: Vec<Vec<f64>> = (0..p)
        .map(|_| {
            (0..n)
                .map(|i| {
                    let signal = if dx[i] == "patient" { effect } else { 0.0 };
                    signal + 2.0 * age[i] + noise_sd * noise.normal()
                })
                .collect()
        })
        .collect();
    assemble(
        feature_names(p),
        x,
        vec![("age".into(), Column::Numeric(age)), ("dx".into(), Column::Categorical(dx))],
    )
}

/// `y = x * beta + noise_sd * N(0, 1)` with `beta_j ~ N(0, 1)`.
pub fn linear_regression(n: usize, p: usize, noise_sd: f64, seed: u64) -> Table {
    let root = RngStream::new(seed, 0);
    let x = gaussian_columns(n, p, &mut root.split(0));
    let mut b = root.split(1);
    let beta: Vec<f64> = (0..p).map(|_| b.normal()).collect();
    let mut e = root.split(2);
    let y: Vec<f64> = (0..n)
        .map(|i| (0..p).map(|j| x[j][i] * beta[j]).sum::<f64>() + noise_sd * e.normal())
        .collect();
    assemble(feature_names(p), x, vec![("y".into(), Column::Numeric(y))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{mean, pearson_r};

    #[test]
    fn names_are_padded_and_sorted() {
        let names = feature_names(200);
        assert_eq!(names[0], "f000");
        assert_eq!(names[199], "f199");
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(sorted, names);
        assert_eq!(feature_names(2000)[5], "f0005");
    }

    #[test]
    fn null_target_is_balanced() {
        let t = null_classification(101, 3, 1);
        let y = t.labels("y").unwrap();
        assert_eq!(y.iter().filter(|v| *v == "0").count(), 51);
        assert_eq!(t.n_cols(), 4);
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(null_classification(20, 4, 7), null_classification(20, 4, 7));
        assert_ne!(null_classification(20, 4, 7), null_classification(20, 4, 8));
        assert_eq!(linear_regression(20, 4, 0.1, 7), linear_regression(20, 4, 0.1, 7));
    }

    #[test]
    fn planted_features_carry_the_signal() {
        let t = planted_network(2000, 6, 2, 0.5, 3);
        let y = t.numeric("y").unwrap();
        let names = feature_names(6);
        let r0 = pearson_r(t.numeric(&names[0]).unwrap(), y).unwrap();
        let r5 = pearson_r(t.numeric(&names[5]).unwrap(), y).unwrap();
        assert!((r0 - 0.5).abs() < 0.06, "{r0}");
        assert!(r5.abs() < 0.06, "{r5}");
    }

    #[test]
    fn confound_enters_every_feature() {
        let t = confounded_diagnosis(4000, 2, 1.0, 1.0, 5);
        let age = t.numeric("age").unwrap();
        let dx = t.labels("dx").unwrap();
        let f = t.numeric("f000").unwrap();
        let resid: Vec<f64> = (0..f.len())
            .map(|i| f[i] - 2.0 * age[i] - if dx[i] == "patient" { 1.0 } else { 0.0 })
            .collect();
        assert!(mean(&resid).abs() < 0.06);
        let ages_patient: Vec<f64> = (0..f.len()).filter(|&i| dx[i] == "patient").map(|i| age[i]).collect();
        assert!(mean(&ages_patient).abs() < 0.08);
    }
}

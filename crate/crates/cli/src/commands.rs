use std::io::Write;
use std::path::{Path, PathBuf};

use cvforge::cv::{run_cross_validation, working_table, Outcome};
use cvforge::pipeline::fit_until;
use cvforge::score::Metric;
use cvforge::stats::{compare_fold_scores, PairRow};
use serde::Serialize;

use crate::config::{effective_seed, load_config};
use crate::error::{CliError, EXIT_CONFIG, EXIT_NOT_RETAINED, EXIT_PLAN_MISMATCH};
use crate::result_doc::ResultDoc;

/// A `repeat:fold` pair as given to `--fold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoldId {
    pub repeat: usize,
    pub fold: usize,
}

impl std::str::FromStr for FoldId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (r, f) = s.split_once(':').ok_or_else(|| format!("expected REPEAT:FOLD, found `{s}`"))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer"));
        Ok(FoldId {
            repeat: parse(r)?,
            fold: parse(f)?,
        })
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// `result.json` becomes `result.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn outcome_text(o: &Outcome) -> String {
    match o {
        Outcome::Number(v) => v.to_string(),
        Outcome::Label(s) => s.clone(),
    }
}

pub struct RunArgs {
    pub config: PathBuf,
    pub data: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let seed = effective_seed(args.seed, cfg.seed)?;
    let out = match (&args.out, &cfg.out) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => cfg.base_dir.join(p),
        (None, None) => return Err(CliError::config("out: no output path in the config and no --out given")),
    };
    let (data, shown) = cfg.load_data(args.data.as_deref())?;
    let setup = cfg.setup(&data, seed, args.jobs)?;
    let result = run_cross_validation(&data, &setup).map_err(|e| CliError::from_core("cross-validation", e))?;
    let doc = ResultDoc::from_result(&result, cfg.echo(seed, &shown));
    write_file(&out, doc.to_json().as_bytes())?;

    let scores_path = sibling(&out, "scores.csv");
    let rows = result.scores.iter().map(|s| {
        vec![
            s.repeat.to_string(),
            s.fold.to_string(),
            s.metric.to_string(),
            s.value.to_string(),
            s.n_train.to_string(),
            s.n_test.to_string(),
        ]
    });
    write_file(&scores_path, &csv_bytes(&["repeat", "fold", "metric", "value", "n_train", "n_test"], rows))?;

    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let steps: Vec<&str> = cfg.pipeline.steps().iter().map(|s| s.name.as_str()).collect();
    println!("pipeline {}", steps.join(" -> "));
    println!("{} on {} rows, {}, seed {seed}", setup.scheme.name(), data.n_rows(), doc.plan_shape());
    let width = result.summary.iter().map(|s| s.metric.name().len()).max().unwrap_or(6).max(6);
    println!("{:<width$}  {:>12}  {:>12}", "metric", "mean", "std");
    for s in &result.summary {
        println!("{:<width$}  {:>12.6}  {:>12.6}", s.metric.name(), s.mean, s.std);
    }
    println!("wrote {} and {}", out.display(), scores_path.display());
    Ok(())
}

pub struct CompareArgs {
    pub results: Vec<PathBuf>,
    pub metric: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CompareDoc<'a> {
    metric: Metric,
    results: Vec<&'a str>,
    /// No adjustment for multiple comparisons.
    pairs: &'a [PairRow],
}

fn result_names(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
        .collect();
    stems
        .iter()
        .zip(paths)
        .map(|(s, p)| {
            if s.is_empty() || stems.iter().filter(|o| *o == s).count() > 1 {
                p.display().to_string()
            } else {
                s.clone()
            }
        })
        .collect()
}

fn fmt_stat(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.4}")
    }
}

/// Pairwise rows as a left-aligned text table.
pub fn render_pairs(metric: Metric, pairs: &[PairRow]) -> String {
    let header = ["model_a", "model_b", "mean_a", "mean_b", "t", "df", "p"];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for p in pairs {
        rows.push(vec![
            p.name_a.clone(),
            p.name_b.clone(),
            format!("{:.4}", p.mean_a),
            format!("{:.4}", p.mean_b),
            fmt_stat(p.t),
            format!("{}", p.df),
            format!("{:.4e}", p.p),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = format!("corrected resampled t-test on {metric}\n");
    for r in &rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    if pairs.iter().any(|p| p.degenerate) {
        out.push_str("inf: every fold differs by the same amount, so the test is degenerate\n");
    }
    out
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    if args.results.len() < 2 {
        return Err(CliError::config("compare needs at least two result files"));
    }
    let docs = args.results.iter().map(|p| ResultDoc::load(p)).collect::<Result<Vec<_>, _>>()?;
    let names = result_names(&args.results);
    for (i, d) in docs.iter().enumerate().skip(1) {
        if d.n_samples != docs[0].n_samples || d.fold_plan != docs[0].fold_plan {
            return Err(CliError::new(
                EXIT_PLAN_MISMATCH,
                format!(
                    "fold plan mismatch: `{}` and `{}` were not evaluated on the same folds",
                    names[0], names[i]
                ),
            ));
        }
    }
    let metric: Metric = match &args.metric {
        Some(m) => m.parse().map_err(|e| CliError::from_core("--metric", e))?,
        None => *docs[0]
            .metrics()
            .first()
            .ok_or_else(|| CliError::data(format!("`{}` holds no scores", names[0])))?,
    };
    let mut named = Vec::new();
    for (name, d) in names.iter().zip(&docs) {
        let scores = d
            .fold_scores(metric)
            .ok_or_else(|| CliError::new(EXIT_CONFIG, format!("--metric: `{metric}` is absent from `{name}`")))?;
        named.push((name.clone(), scores));
    }
    let cmp = compare_fold_scores(&named, metric).map_err(|e| CliError::from_core("compare", e))?;
    let text = render_pairs(metric, &cmp.pairs);
    print!("{text}");
    if let Some(out) = &args.out {
        let doc = CompareDoc {
            metric,
            results: names.iter().map(String::as_str).collect(),
            pairs: &cmp.pairs,
        };
        let mut json = serde_json::to_string_pretty(&doc).expect("comparison serializes");
        json.push('\n');
        write_file(out, json.as_bytes())?;
        write_file(&sibling(out, "txt"), text.as_bytes())?;
        let rows = cmp.fold_scores.iter().map(|r| {
            vec![
                r.model.clone(),
                r.repeat.to_string(),
                r.fold.to_string(),
                r.metric.to_string(),
                r.value.to_string(),
            ]
        });
        let fold_csv = sibling(out, "fold_scores.csv");
        write_file(&fold_csv, &csv_bytes(&["model", "repeat", "fold", "metric", "value"], rows))?;
        println!("wrote {}, {} and {}", out.display(), sibling(out, "txt").display(), fold_csv.display());
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum What {
    Predictions,
    Params,
}

pub struct InspectArgs {
    pub result: PathBuf,
    pub fold: Option<FoldId>,
    pub what: What,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct FoldParamsOut<'a> {
    repeat: usize,
    fold: usize,
    steps: &'a serde_json::Value,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

pub fn inspect(args: &InspectArgs) -> Result<(), CliError> {
    let doc = ResultDoc::load(&args.result)?;
    if let Some(f) = args.fold {
        if !doc.has_fold(f.repeat, f.fold) {
            return Err(CliError::new(
                EXIT_NOT_RETAINED,
                format!("--fold {}:{} is out of range: the plan has {}", f.repeat, f.fold, doc.plan_shape()),
            ));
        }
    }
    let wanted = |repeat: usize, fold: usize| args.fold.is_none_or(|f| f.repeat == repeat && f.fold == fold);
    match args.what {
        What::Predictions => {
            let rows = doc.predictions.iter().filter(|p| wanted(p.repeat, p.fold)).map(|p| {
                vec![
                    p.index.to_string(),
                    p.repeat.to_string(),
                    p.fold.to_string(),
                    outcome_text(&p.y_true),
                    outcome_text(&p.y_pred),
                ]
            });
            emit(args.out.as_deref(), &csv_bytes(&["index", "repeat", "fold", "y_true", "y_pred"], rows))
        }
        What::Params => {
            let fitted = doc.fitted_params.as_ref().ok_or_else(|| {
                CliError::new(
                    EXIT_NOT_RETAINED,
                    "fitted pipelines were not retained in this result; rerun with \"retain\": true",
                )
            })?;
            let selected: Vec<FoldParamsOut> = fitted
                .iter()
                .filter(|f| wanted(f.repeat, f.fold))
                .map(|f| FoldParamsOut {
                    repeat: f.repeat,
                    fold: f.fold,
                    steps: &f.steps,
                })
                .collect();
            let mut json = serde_json::to_string_pretty(&selected).expect("params serialize");
            json.push('\n');
            emit(args.out.as_deref(), json.as_bytes())
        }
    }
}

pub struct PreprocessArgs {
    pub config: PathBuf,
    pub until: String,
    pub out: Option<PathBuf>,
}

pub fn preprocess(args: &PreprocessArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let (data, _) = cfg.load_data(None)?;
    let setup = cfg.setup(&data, 0, 1)?;
    setup.types.validate(&data).map_err(|e| CliError::from_core("x_types", e))?;
    let (table, target) = working_table(&data, &setup).map_err(|e| CliError::from_core("data", e))?;
    let first = cfg.pipeline.candidates().swap_remove(0);
    let spec = cfg.pipeline.with_choice(&first).map_err(|e| CliError::from_core("pipeline", e))?;
    if cfg.pipeline.grid_size() > 1 {
        eprintln!("note: grids are fixed at their first value for preprocessing");
    }
    let out = fit_until(&spec, &table, &setup.types, &target, &args.until)
        .map_err(|e| CliError::from_core(&format!("--until {}", args.until), e))?;
    eprintln!(
        "note: fitted on all {} rows without cross-validation; for inspection only",
        data.n_rows()
    );
    let mut bytes = Vec::new();
    cvforge::table::write_csv_to(&out, &mut bytes).map_err(|e| CliError::from_core("output", e))?;
    emit(args.out.as_deref(), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_ids_parse() {
        assert_eq!("0:7".parse::<FoldId>().unwrap(), FoldId { repeat: 0, fold: 7 });
        assert!("7".parse::<FoldId>().is_err());
        assert!("a:1".parse::<FoldId>().is_err());
    }

    #[test]
    fn names_fall_back_to_paths_on_collision() {
        let names = result_names(&[PathBuf::from("a/x.json"), PathBuf::from("b/x.json"), PathBuf::from("y.json")]);
        assert_eq!(names, vec!["a/x.json", "b/x.json", "y"]);
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Path::new("out/r.json"), "scores.csv"), PathBuf::from("out/r.scores.csv"));
        assert_eq!(sibling(Path::new("r"), "txt"), PathBuf::from("r.txt"));
    }

    #[test]
    fn text_table_is_aligned() {
        let row = |a: &str, t: f64| PairRow {
            name_a: a.into(),
            name_b: "b".into(),
            t,
            df: 4.0,
            p: 0.5,
            mean_a: 1.0,
            mean_b: 2.0,
            degenerate: t.is_infinite(),
        };
        let text = render_pairs(Metric::R2, &[row("long_name", 1.0), row("a", f64::INFINITY)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1].find("model_b"), lines[2].find(" b ").map(|i| i + 1));
        assert!(text.contains("inf"));
        assert!(text.contains("degenerate"));
    }
}

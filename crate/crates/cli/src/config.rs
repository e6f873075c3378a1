//! Run configuration: a single JSON document with the top-level keys
//! `data, features, target, x_types, pipeline, problem_type, cv, scoring,
//! seed, retain, out`. Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use cvforge::cv::{CvScheme, CvSetup, TuningConfig};
use cvforge::model::ProblemType;
use cvforge::params::ParamValue;
use cvforge::pipeline::PipelineSpec;
use cvforge::score::Metric;
use cvforge::table::{ColumnSelector, CsvSchema, FeatureTypeMap, Table};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Environment variable consulted when neither `--seed` nor the config
/// sets a seed.
pub const SEED_ENV: &str = "CVFORGE_SEED";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data: Option<String>,
    features: Value,
    target: String,
    #[serde(default)]
    x_types: Map<String, Value>,
    pipeline: Vec<RawStep>,
    problem_type: String,
    cv: Map<String, Value>,
    scoring: Option<Value>,
    seed: Option<u64>,
    #[serde(default)]
    retain: bool,
    out: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStep {
    kind: String,
    name: Option<String>,
    #[serde(default)]
    params: Map<String, Value>,
    apply_to: Option<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureSpec {
    List(Vec<String>),
    /// Every column except these, the target and grouping columns.
    AllBut(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// The document as written, used for the result's config echo.
    pub raw: Map<String, Value>,
    /// Directory that relative paths in the document resolve against.
    pub base_dir: PathBuf,
    pub data: Option<String>,
    pub features: FeatureSpec,
    pub target: String,
    pub types: FeatureTypeMap,
    pub pipeline: PipelineSpec,
    pub scheme: CvScheme,
    pub tuning: TuningConfig,
    pub scoring: Vec<Metric>,
    pub seed: Option<u64>,
    pub retain: bool,
    pub out: Option<String>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config(&text, base)
}

fn strings(key: &str, v: &Value) -> Result<Vec<String>, CliError> {
    match v {
        Value::String(s) => Ok(vec![s.clone()]),
        Value::Array(items) => items
            .iter()
            .map(|i| {
                i.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| CliError::config(format!("{key}: expected strings, found {i}")))
            })
            .collect(),
        other => Err(CliError::config(format!("{key}: expected a string or a list of strings, found {other}"))),
    }
}

fn param_value(key: &str, v: &Value) -> Result<ParamValue, CliError> {
    match v {
        Value::Bool(b) => Ok(ParamValue::Bool(*b)),
        Value::Number(n) => Ok(match n.as_i64() {
            Some(i) => ParamValue::Int(i),
            None => ParamValue::Float(n.as_f64().expect("finite JSON number")),
        }),
        Value::String(s) => Ok(ParamValue::Text(s.clone())),
        other => Err(CliError::config(format!("{key}: expected a number, string or bool, found {other}"))),
    }
}

fn selector(key: &str, v: &Value) -> Result<ColumnSelector, CliError> {
    match v {
        Value::String(s) => Ok(ColumnSelector::parse(s)),
        Value::Array(_) => {
            let types = strings(key, v)?;
            if types.iter().any(|t| t == "*" || t == "all_features") {
                return Err(CliError::config(format!("{key}: `*` cannot be combined with type names")));
            }
            Ok(ColumnSelector::ByType(types))
        }
        Value::Object(m) => {
            if let Some(k) = m.keys().find(|k| *k != "columns") {
                return Err(CliError::config(format!("{key}: unknown key `{k}`, expected `columns`")));
            }
            let cols = m
                .get("columns")
                .ok_or_else(|| CliError::config(format!("{key}: missing key `columns`")))?;
            Ok(ColumnSelector::ByName(strings(&format!("{key}.columns"), cols)?))
        }
        other => Err(CliError::config(format!(
            "{key}: expected a type name, a list of type names or {{\"columns\": [...]}}, found {other}"
        ))),
    }
}

fn scheme(key: &str, v: Value) -> Result<CvScheme, CliError> {
    let s: CvScheme = serde_json::from_value(v).map_err(|e| CliError::config(format!("{key}: {e}")))?;
    let k = match &s {
        CvScheme::Kfold { k, .. } | CvScheme::StratifiedKfold { k, .. } | CvScheme::GroupKfold { k, .. } => Some(*k),
        CvScheme::RepeatedKfold { k, repeats } => {
            if *repeats == 0 {
                return Err(CliError::config(format!("{key}.repeats: must be at least 1")));
            }
            Some(*k)
        }
        CvScheme::LeaveOneOut => None,
    };
    if k.is_some_and(|k| k < 2) {
        return Err(CliError::config(format!("{key}.k: must be at least 2")));
    }
    Ok(s)
}

fn metric(key: &str, v: &Value) -> Result<Metric, CliError> {
    let name = v
        .as_str()
        .ok_or_else(|| CliError::config(format!("{key}: expected a metric name, found {v}")))?;
    name.parse().map_err(|e: cvforge::Error| CliError::config(format!("{key}: {e}")))
}

/// Validates a config document; nothing touches the data yet.
pub fn parse_config(text: &str, base_dir: PathBuf) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::config(format!("config is not valid JSON: {e}")))?;
    let Value::Object(raw) = value else {
        return Err(CliError::config("config must be a JSON object"));
    };
    let cfg: RawConfig =
        serde_json::from_value(Value::Object(raw.clone())).map_err(|e| CliError::config(format!("config: {e}")))?;

    let problem = match cfg.problem_type.as_str() {
        "regression" => ProblemType::Regression,
        "classification" => ProblemType::Classification,
        other => {
            return Err(CliError::config(format!(
                "problem_type: expected `regression` or `classification`, found `{other}`"
            )))
        }
    };

    let features = match &cfg.features {
        Value::Object(m) => {
            if let Some(k) = m.keys().find(|k| *k != "all_but") {
                return Err(CliError::config(format!("features: unknown key `{k}`, expected `all_but`")));
            }
            FeatureSpec::AllBut(strings("features.all_but", m.get("all_but").unwrap_or(&Value::Array(vec![])))?)
        }
        v @ Value::Array(_) => {
            let list = strings("features", v)?;
            if list.is_empty() {
                return Err(CliError::config("features: the list is empty"));
            }
            FeatureSpec::List(list)
        }
        other => {
            return Err(CliError::config(format!(
                "features: expected a list of columns or {{\"all_but\": [...]}}, found {other}"
            )))
        }
    };

    let mut assignments = Vec::new();
    for (ty, cols) in &cfg.x_types {
        assignments.push((ty.clone(), strings(&format!("x_types.{ty}"), cols)?));
    }
    let types = FeatureTypeMap::new(assignments).map_err(|e| CliError::config(format!("x_types: {e}")))?;

    if cfg.pipeline.is_empty() {
        return Err(CliError::config("pipeline: at least a model step is required"));
    }
    let mut pipeline = PipelineSpec::new(problem);
    for (i, step) in cfg.pipeline.iter().enumerate() {
        let key = format!("pipeline[{i}]");
        let mut params = Vec::new();
        for (name, v) in &step.params {
            let pkey = format!("{key}.params.{name}");
            let grid = match v {
                Value::Array(items) => items.iter().map(|x| param_value(&pkey, x)).collect::<Result<Vec<_>, _>>()?,
                scalar => vec![param_value(&pkey, scalar)?],
            };
            params.push((name.clone(), grid));
        }
        let apply_to = step
            .apply_to
            .as_ref()
            .map(|v| selector(&format!("{key}.apply_to"), v))
            .transpose()?;
        pipeline = pipeline
            .add_named_step(step.name.as_deref(), &step.kind, params, apply_to)
            .map_err(|e| CliError::from_core(&format!("{key} ({})", step.kind), e))?;
    }
    pipeline
        .validate()
        .map_err(|e| CliError::from_core("pipeline", e))?;

    let mut cv = cfg.cv.clone();
    let inner = cv.remove("inner").map(|v| scheme("cv.inner", v)).transpose()?;
    let objective = cv.remove("objective").map(|v| metric("cv.objective", &v)).transpose()?;
    let scheme = scheme("cv", Value::Object(cv))?;

    let scoring = match &cfg.scoring {
        None => vec![match problem {
            ProblemType::Regression => Metric::NegMeanAbsoluteError,
            ProblemType::Classification => Metric::Accuracy,
        }],
        Some(v @ Value::String(_)) => vec![metric("scoring", v)?],
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, m)| metric(&format!("scoring[{i}]"), m))
            .collect::<Result<Vec<_>, _>>()?,
        Some(other) => return Err(CliError::config(format!("scoring: expected a metric name or a list, found {other}"))),
    };
    if scoring.is_empty() {
        return Err(CliError::config("scoring: the list is empty"));
    }
    for (i, m) in scoring.iter().chain(objective.iter()).enumerate() {
        if m.problem_type() != problem {
            let key = if i < scoring.len() { format!("scoring[{i}]") } else { "cv.objective".into() };
            return Err(CliError::config(format!("{key}: `{m}` is not defined for {}", problem.name())));
        }
    }

    Ok(RunConfig {
        raw,
        base_dir,
        data: cfg.data,
        features,
        target: cfg.target,
        types,
        pipeline,
        scheme,
        tuning: TuningConfig { inner, objective },
        scoring,
        seed: cfg.seed,
        retain: cfg.retain,
        out: cfg.out,
    })
}

/// `--seed`, then the config, then `CVFORGE_SEED`, then 0.
pub fn effective_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("{SEED_ENV}: `{v}` is not a non-negative integer"))),
        Err(_) => Ok(0),
    }
}

impl RunConfig {
    /// The data path: the override as given, else the config's path relative
    /// to the config file.
    pub fn data_path(&self, data_override: Option<&Path>) -> Result<(PathBuf, String), CliError> {
        if let Some(p) = data_override {
            return Ok((p.to_path_buf(), p.display().to_string()));
        }
        let d = self
            .data
            .as_ref()
            .ok_or_else(|| CliError::config("data: no data path in the config and no --data given"))?;
        Ok((self.base_dir.join(d), d.clone()))
    }

    /// Columns read alongside the features but never used as inputs.
    pub fn auxiliary_columns(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        out.extend(self.scheme.group_column().map(str::to_string));
        if let Some(inner) = &self.tuning.inner {
            out.extend(inner.group_column().map(str::to_string));
        }
        for step in self.pipeline.steps() {
            for (p, values) in &step.params {
                if p == "subgroup_column" {
                    out.extend(values.iter().filter_map(|v| v.as_str()).map(str::to_string));
                }
            }
        }
        out
    }

    pub fn csv_schema(&self) -> CsvSchema {
        let mut schema = CsvSchema::default();
        if self.pipeline.problem_type() == ProblemType::Classification {
            schema.categorical.push(self.target.clone());
        }
        schema
    }

    pub fn load_data(&self, data_override: Option<&Path>) -> Result<(Table, String), CliError> {
        let (path, shown) = self.data_path(data_override)?;
        let table = cvforge::table::read_csv(&path, Some(&self.csv_schema()))
            .map_err(|e| CliError::from_core(&format!("data {}", path.display()), e))?;
        Ok((table, shown))
    }

    pub fn feature_columns(&self, data: &Table) -> Result<Vec<String>, CliError> {
        match &self.features {
            FeatureSpec::List(list) => Ok(list.clone()),
            FeatureSpec::AllBut(excluded) => {
                if let Some(bad) = excluded.iter().find(|c| !data.has_column(c)) {
                    return Err(CliError::data(format!("features.all_but: unknown column `{bad}`")));
                }
                let aux = self.auxiliary_columns();
                let out: Vec<String> = data
                    .names()
                    .iter()
                    .filter(|c| **c != self.target && !excluded.contains(c) && !aux.contains(c))
                    .cloned()
                    .collect();
                if out.is_empty() {
                    return Err(CliError::data("features: no columns remain after exclusions"));
                }
                Ok(out)
            }
        }
    }

    pub fn setup(&self, data: &Table, seed: u64, jobs: usize) -> Result<CvSetup, CliError> {
        Ok(CvSetup {
            features: self.feature_columns(data)?,
            target: self.target.clone(),
            types: self.types.clone(),
            pipeline: self.pipeline.clone(),
            scheme: self.scheme.clone(),
            scoring: self.scoring.clone(),
            tuning: self.tuning.clone(),
            seed,
            retain_pipelines: self.retain,
            jobs,
        })
    }

    /// The document with the effective seed and data path filled in and
    /// `out` removed, so the same run written to two places echoes the same.
    pub fn echo(&self, seed: u64, data: &str) -> Value {
        let mut m = self.raw.clone();
        m.insert("data".into(), Value::String(data.to_string()));
        m.insert("seed".into(), Value::from(seed));
        m.shift_remove("out");
        Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{EXIT_CONFIG, EXIT_DATA};

    fn base() -> Value {
        serde_json::json!({
            "data": "d.csv",
            "features": ["a", "b"],
            "target": "y",
            "pipeline": [{"kind": "zscore"}, {"kind": "ridge", "params": {"lambda": [0.1, 1]}}],
            "problem_type": "regression",
            "cv": {"kind": "kfold", "k": 3}
        })
    }

    fn parse(v: &Value) -> Result<RunConfig, CliError> {
        parse_config(&v.to_string(), PathBuf::new())
    }

    fn fails_naming(v: Value, needle: &str) {
        let err = parse(&v).expect_err("config should be rejected");
        assert_eq!(err.code, EXIT_CONFIG, "{}", err.message);
        assert!(err.message.contains(needle), "`{}` does not mention `{needle}`", err.message);
    }

    #[test]
    fn minimal_config_parses() {
        let c = parse(&base()).unwrap();
        assert_eq!(c.pipeline.grid_size(), 2);
        assert_eq!(c.scoring, vec![Metric::NegMeanAbsoluteError]);
        assert_eq!(c.scheme, CvScheme::Kfold { k: 3, shuffle: false });
        assert_eq!(c.features, FeatureSpec::List(vec!["a".into(), "b".into()]));
    }

    #[test]
    fn integer_grid_values_stay_integers() {
        let c = parse(&base()).unwrap();
        let (_, values) = &c.pipeline.steps()[1].params[0];
        assert_eq!(values, &vec![ParamValue::Float(0.1), ParamValue::Int(1)]);
    }

    #[test]
    fn unknown_keys_are_named() {
        let mut v = base();
        v["colour"] = Value::from("red");
        fails_naming(v, "colour");
        let mut v = base();
        v["pipeline"][0]["weight"] = Value::from(1);
        fails_naming(v, "weight");
        let mut v = base();
        v["cv"]["folds"] = Value::from(3);
        fails_naming(v, "folds");
        let mut v = base();
        v["pipeline"][1]["params"]["alpha"] = Value::from(1);
        fails_naming(v, "alpha");
    }

    #[test]
    fn unknown_kind_is_named() {
        let mut v = base();
        v["pipeline"][1]["kind"] = Value::from("pls");
        fails_naming(v, "pls");
    }

    #[test]
    fn missing_and_malformed_fields() {
        let mut v = base();
        v.as_object_mut().unwrap().remove("target");
        fails_naming(v, "target");
        let mut v = base();
        v["problem_type"] = Value::from("ranking");
        fails_naming(v, "problem_type");
        let mut v = base();
        v["scoring"] = Value::from("accuracy");
        fails_naming(v, "scoring");
        let mut v = base();
        v["cv"]["k"] = Value::from(1);
        fails_naming(v, "cv.k");
        let mut v = base();
        v["pipeline"][1]["params"]["lambda"] = serde_json::json!([]);
        fails_naming(v, "lambda");
        let mut v = base();
        v["pipeline"][0]["apply_to"] = serde_json::json!({"cols": ["a"]});
        fails_naming(v, "apply_to");
        fails_naming(Value::from(3), "object");
    }

    #[test]
    fn nested_inner_scheme_and_objective() {
        let mut v = base();
        v["cv"] = serde_json::json!({"kind": "repeated_kfold", "k": 5, "repeats": 2, "inner": {"kind": "kfold", "k": 4}, "objective": "r2"});
        v["scoring"] = serde_json::json!(["neg_mean_absolute_error", "r2"]);
        let c = parse(&v).unwrap();
        assert_eq!(c.tuning.inner, Some(CvScheme::Kfold { k: 4, shuffle: false }));
        assert_eq!(c.tuning.objective, Some(Metric::R2));
        assert_eq!(c.scoring.len(), 2);
    }

    #[test]
    fn all_but_excludes_target_and_grouping() {
        let mut v = base();
        v["features"] = serde_json::json!({"all_but": ["id"]});
        v["cv"] = serde_json::json!({"kind": "group_kfold", "k": 2, "group": "site"});
        let c = parse(&v).unwrap();
        let data = Table::new(
            ["id", "a", "site", "y", "b"]
                .iter()
                .map(|n| (n.to_string(), cvforge::table::Column::Numeric(vec![1.0, 2.0])))
                .collect(),
        )
        .unwrap();
        assert_eq!(c.feature_columns(&data).unwrap(), vec!["a", "b"]);
        let mut v = base();
        v["features"] = serde_json::json!({"all_but": ["nope"]});
        assert_eq!(parse(&v).unwrap().feature_columns(&data).unwrap_err().code, EXIT_DATA);
    }

    #[test]
    fn echo_drops_out_and_pins_seed() {
        let mut v = base();
        v["out"] = Value::from("r.json");
        let c = parse(&v).unwrap();
        let e = c.echo(7, "other.csv");
        assert_eq!(e["seed"], Value::from(7));
        assert_eq!(e["data"], Value::from("other.csv"));
        assert!(e.get("out").is_none());
        let keys: Vec<&String> = e.as_object().unwrap().keys().collect();
        assert_eq!(keys[0], "data");
    }

    #[test]
    fn seed_priority() {
        assert_eq!(effective_seed(Some(3), Some(4)).unwrap(), 3);
        assert_eq!(effective_seed(None, Some(4)).unwrap(), 4);
    }
}

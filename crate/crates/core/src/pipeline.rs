//! Declarative pipelines: ordered transformer steps ending in one model,
//! with hyperparameter grids declared inside each step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, FittedModel, ModelSpec, ProblemType, Target};
use crate::numerics::{Matrix, RngStream};
use crate::params::ParamValue;
use crate::table::{ColumnSelector, FeatureTypeMap, Table, REMOVED_CONFOUND};
use crate::transform::{FittedTransformer, TransformerKind, TransformerSpec};

/// One step as declared: each parameter carries a non-empty candidate list;
/// a scalar is a one-element list.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDecl {
    pub name: String,
    pub kind: String,
    pub params: Vec<(String, Vec<ParamValue>)>,
    pub apply_to: ColumnSelector,
}

impl StepDecl {
    pub fn is_model(&self) -> bool {
        ModelSpec::is_model_kind(&self.kind)
    }

    fn scalar_params(&self) -> Result<Vec<(String, ParamValue)>> {
        self.params
            .iter()
            .map(|(p, values)| match values.as_slice() {
                [v] => Ok((p.clone(), v.clone())),
                _ => Err(Error::UnresolvedGrid(format!("{}.{}", self.name, p))),
            })
            .collect()
    }
}

/// A selected value for one step parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamChoice {
    pub step: String,
    pub param: String,
    pub value: ParamValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSpec {
    problem_type: ProblemType,
    steps: Vec<StepDecl>,
}

fn check_params(kind: &str, problem: ProblemType, params: &[(String, ParamValue)]) -> Result<()> {
    if ModelSpec::is_model_kind(kind) {
        let spec = ModelSpec::from_params(kind, params)?;
        if !spec.supports(problem) {
            return Err(Error::InvalidParameter(format!(
                "model `{kind}` does not support {}",
                problem.name()
            )));
        }
    } else {
        TransformerKind::from_params(kind, params)?;
    }
    Ok(())
}

impl PipelineSpec {
    pub fn new(problem_type: ProblemType) -> Self {
        Self {
            problem_type,
            steps: Vec::new(),
        }
    }

    pub fn problem_type(&self) -> ProblemType {
        self.problem_type
    }

    pub fn steps(&self) -> &[StepDecl] {
        &self.steps
    }

    pub fn model_step(&self) -> Option<&StepDecl> {
        self.steps.last().filter(|s| s.is_model())
    }

    /// Appends a step named after its kind.
    pub fn add_step(
        self,
        kind: &str,
        params: Vec<(String, Vec<ParamValue>)>,
        apply_to: Option<ColumnSelector>,
    ) -> Result<Self> {
        self.add_named_step(None, kind, params, apply_to)
    }

    /// Appends a step. Without an explicit name the kind is used, suffixed
    /// `_2`, `_3`, ... on collision.
    pub fn add_named_step(
        mut self,
        name: Option<&str>,
        kind: &str,
        params: Vec<(String, Vec<ParamValue>)>,
        apply_to: Option<ColumnSelector>,
    ) -> Result<Self> {
        if !ModelSpec::is_model_kind(kind) && !TransformerKind::is_transformer_kind(kind) {
            return Err(Error::UnknownKind(kind.to_string()));
        }
        if self.model_step().is_some() {
            return Err(Error::ModelNotFinal);
        }
        let taken = |n: &str| self.steps.iter().any(|s| s.name == n);
        let name = match name {
            Some("") => return Err(Error::InvalidParameter("empty step name".into())),
            Some(n) if taken(n) => return Err(Error::InvalidParameter(format!("duplicate step name `{n}`"))),
            Some(n) => n.to_string(),
            None => {
                let mut candidate = kind.to_string();
                let mut k = 2;
                while taken(&candidate) {
                    candidate = format!("{kind}_{k}");
                    k += 1;
                }
                candidate
            }
        };
        for (i, (p, values)) in params.iter().enumerate() {
            if params[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::InvalidParameter(format!("parameter `{name}.{p}` declared twice")));
            }
            if values.is_empty() {
                return Err(Error::EmptyGrid(format!("{name}.{p}")));
            }
        }
        // Every candidate must type-check with the other parameters at their
        // first value.
        let firsts: Vec<(String, ParamValue)> = params.iter().map(|(p, v)| (p.clone(), v[0].clone())).collect();
        check_params(kind, self.problem_type, &firsts).map_err(|e| e.in_step(&name))?;
        for (i, (_, values)) in params.iter().enumerate() {
            for v in &values[1..] {
                let mut probe = firsts.clone();
                probe[i].1 = v.clone();
                check_params(kind, self.problem_type, &probe).map_err(|e| e.in_step(&name))?;
            }
        }
        self.steps.push(StepDecl {
            name,
            kind: kind.to_string(),
            params,
            apply_to: apply_to.unwrap_or_else(TransformerKind::default_selector),
        });
        Ok(self)
    }

    /// Fails unless the pipeline ends in a model.
    pub fn validate(&self) -> Result<()> {
        match self.model_step() {
            Some(_) => Ok(()),
            None => Err(Error::MissingModel),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.steps.iter().flat_map(|s| &s.params).map(|(_, v)| v.len()).product()
    }

    pub fn is_resolved(&self) -> bool {
        self.grid_size() == 1
    }

    /// Cartesian product of all grids: steps and parameters in declaration
    /// order, the last parameter varying fastest.
    pub fn candidates(&self) -> Vec<Vec<ParamChoice>> {
        let axes: Vec<(&str, &str, &[ParamValue])> = self
            .steps
            .iter()
            .flat_map(|s| s.params.iter().map(move |(p, v)| (s.name.as_str(), p.as_str(), v.as_slice())))
            .collect();
        let mut out = Vec::with_capacity(self.grid_size());
        let mut idx = vec![0usize; axes.len()];
        loop {
            out.push(
                axes.iter()
                    .zip(&idx)
                    .map(|((step, param, values), &k)| ParamChoice {
                        step: step.to_string(),
                        param: param.to_string(),
                        value: values[k].clone(),
                    })
                    .collect(),
            );
            let mut d = axes.len();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < axes[d].2.len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Collapses every grid to the chosen value.
    pub fn with_choice(&self, choice: &[ParamChoice]) -> Result<PipelineSpec> {
        let mut out = self.clone();
        for c in choice {
            let step = out
                .steps
                .iter_mut()
                .find(|s| s.name == c.step)
                .ok_or_else(|| Error::UnknownStep(c.step.clone()))?;
            let slot = step
                .params
                .iter_mut()
                .find(|(p, _)| *p == c.param)
                .ok_or_else(|| Error::UnknownParameter {
                    kind: step.kind.clone(),
                    param: c.param.clone(),
                })?;
            slot.1 = vec![c.value.clone()];
        }
        Ok(out)
    }

    /// Current value of every declared parameter of a resolved spec.
    pub fn resolved_params(&self) -> Result<Vec<ParamChoice>> {
        let mut out = Vec::new();
        for s in &self.steps {
            for (param, value) in s.scalar_params()? {
                out.push(ParamChoice {
                    step: s.name.clone(),
                    param,
                    value,
                });
            }
        }
        Ok(out)
    }
}

/// A fitted transformer with its step name.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedStep {
    pub name: String,
    pub transformer: FittedTransformer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedPipeline {
    steps: Vec<FittedStep>,
    model_step: String,
    model: FittedModel,
    model_inputs: Vec<String>,
    types: FeatureTypeMap,
    params: Vec<ParamChoice>,
    warnings: Vec<String>,
}

impl FittedPipeline {
    pub fn steps(&self) -> &[FittedStep] {
        &self.steps
    }

    pub fn model_step(&self) -> &str {
        &self.model_step
    }

    pub fn model(&self) -> &FittedModel {
        &self.model
    }

    /// Columns fed to the model, in order.
    pub fn model_inputs(&self) -> &[String] {
        &self.model_inputs
    }

    /// Type assignments after the last transformer.
    pub fn types(&self) -> &FeatureTypeMap {
        &self.types
    }

    pub fn params(&self) -> &[ParamChoice] {
        &self.params
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Numeric feature columns the model sees: every feature still present
/// except confounds already regressed out.
fn model_inputs(table: &Table, types: &FeatureTypeMap) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for name in table.feature_names() {
        if types.type_of(name) == REMOVED_CONFOUND {
            continue;
        }
        if !table.column(name)?.is_numeric() {
            return Err(Error::NotNumeric(name.to_string()));
        }
        out.push(name.to_string());
    }
    if out.is_empty() {
        return Err(Error::NoFeaturesRemain);
    }
    Ok(out)
}

fn design(table: &Table, columns: &[String]) -> Result<Matrix> {
    let cols: Vec<&[f64]> = columns.iter().map(|c| table.numeric(c)).collect::<Result<_>>()?;
    Matrix::from_columns(table.n_rows(), &cols)
}

/// Fits a resolved pipeline: each step on the output of the previous one.
pub fn fit_pipeline(
    spec: &PipelineSpec,
    train: &Table,
    types: &FeatureTypeMap,
    target: &Target,
    rng: &RngStream,
) -> Result<FittedPipeline> {
    spec.validate()?;
    if target.problem_type() != spec.problem_type() {
        return Err(Error::InvalidParameter(format!(
            "pipeline is for {} but the target is {}",
            spec.problem_type().name(),
            target.problem_type().name()
        )));
    }
    let params = spec.resolved_params()?;
    let mut table = train.clone();
    let mut types = types.clone();
    let mut steps = Vec::with_capacity(spec.steps().len() - 1);
    let mut warnings = Vec::new();
    let (model_decl, transformers) = spec.steps().split_last().expect("validated");
    for decl in transformers {
        let scalar = decl.scalar_params()?;
        let fitted = TransformerKind::from_params(&decl.kind, &scalar)
            .map(|kind| TransformerSpec::new(kind, decl.apply_to.clone()))
            .and_then(|t| t.fit_apply(&table, &types, target))
            .map_err(|e| e.in_step(&decl.name))?;
        warnings.extend(fitted.transformer.warnings().iter().map(|w| format!("{}: {w}", decl.name)));
        table = fitted.table;
        types = fitted.types;
        steps.push(FittedStep {
            name: decl.name.clone(),
            transformer: fitted.transformer,
        });
    }
    let model_spec = ModelSpec::from_params(&model_decl.kind, &model_decl.scalar_params()?)
        .map_err(|e| e.in_step(&model_decl.name))?;
    let inputs = model_inputs(&table, &types).map_err(|e| e.in_step(&model_decl.name))?;
    let x = design(&table, &inputs)?;
    let model = model::fit(&model_spec, &x, target, rng).map_err(|e| e.in_step(&model_decl.name))?;
    Ok(FittedPipeline {
        steps,
        model_step: model_decl.name.clone(),
        model,
        model_inputs: inputs,
        types,
        params,
        warnings,
    })
}

/// Fits the transformer steps up to and including `step` on `data` and
/// returns `data` as it leaves that step. The model is not fitted.
pub fn fit_until(spec: &PipelineSpec, data: &Table, types: &FeatureTypeMap, target: &Target, step: &str) -> Result<Table> {
    spec.validate()?;
    let (model_decl, transformers) = spec.steps().split_last().expect("validated");
    if step == model_decl.name {
        return Err(Error::ModelNotPreprocessable);
    }
    let last = transformers
        .iter()
        .position(|s| s.name == step)
        .ok_or_else(|| Error::UnknownStep(step.to_string()))?;
    let mut table = data.clone();
    let mut types = types.clone();
    for decl in &transformers[..=last] {
        let scalar = decl.scalar_params()?;
        let fitted = TransformerKind::from_params(&decl.kind, &scalar)
            .map(|kind| TransformerSpec::new(kind, decl.apply_to.clone()))
            .and_then(|t| t.fit_apply(&table, &types, target))
            .map_err(|e| e.in_step(&decl.name))?;
        table = fitted.table;
        types = fitted.types;
    }
    Ok(table)
}

/// Applies every fitted step, then the model.
pub fn pipeline_predict(fp: &FittedPipeline, data: &Table) -> Result<Target> {
    let mut table = data.clone();
    for s in &fp.steps {
        table = s.transformer.apply(&table).map_err(|e| e.in_step(&s.name))?;
    }
    let x = design(&table, &fp.model_inputs).map_err(|e| e.in_step(&fp.model_step))?;
    fp.model.predict(&x)
}

/// The table as it leaves the named transformer step.
pub fn preprocess_until(fp: &FittedPipeline, data: &Table, step: &str) -> Result<Table> {
    if step == fp.model_step {
        return Err(Error::ModelNotPreprocessable);
    }
    let last = fp
        .steps
        .iter()
        .position(|s| s.name == step)
        .ok_or_else(|| Error::UnknownStep(step.to_string()))?;
    let mut table = data.clone();
    for s in &fp.steps[..=last] {
        table = s.transformer.apply(&table).map_err(|e| e.in_step(&s.name))?;
    }
    Ok(table)
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single hyperparameter value as it appears in a pipeline declaration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v:?}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

/// Typed access to a step's scalar parameters, rejecting unknown names.
pub(crate) struct ParamReader<'a> {
    kind: &'a str,
    params: &'a [(String, ParamValue)],
}

impl<'a> ParamReader<'a> {
    pub(crate) fn new(kind: &'a str, params: &'a [(String, ParamValue)], known: &[&str]) -> Result<Self> {
        if let Some((name, _)) = params.iter().find(|(n, _)| !known.contains(&n.as_str())) {
            return Err(Error::UnknownParameter {
                kind: kind.to_string(),
                param: name.clone(),
            });
        }
        Ok(Self { kind, params })
    }

    pub(crate) fn get(&self, name: &str) -> Option<&'a ParamValue> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn invalid(&self, name: &str, want: &str) -> Error {
        Error::InvalidParameter(format!("`{}.{}` must be {}", self.kind, name, want))
    }

    pub(crate) fn f64_or(&self, name: &str, default: f64) -> Result<f64> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| self.invalid(name, "a finite number")),
        }
    }

    pub(crate) fn text_or(&self, name: &str, default: &'a str) -> Result<&'a str> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v.as_str().ok_or_else(|| self.invalid(name, "a string")),
        }
    }

    pub(crate) fn opt_text(&self, name: &str) -> Result<Option<&'a str>> {
        match self.get(name) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| self.invalid(name, "a string")),
        }
    }

    pub(crate) fn bool_or(&self, name: &str, default: bool) -> Result<bool> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or_else(|| self.invalid(name, "a boolean")),
        }
    }

    pub(crate) fn fail(&self, name: &str, want: &str) -> Error {
        self.invalid(name, want)
    }
}

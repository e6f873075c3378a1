use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(String),
    #[error("no header")]
    NoHeader,
    #[error("ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("empty column name at position {0}")]
    EmptyColumnName(usize),
    #[error("missing value in column `{column}` at line {line}")]
    MissingValue { column: String, line: u64 },
    #[error("column `{column}` is declared numeric but line {line} holds `{value}`")]
    NotParsable {
        column: String,
        line: u64,
        value: String,
    },
    #[error("non-finite value `{value}` in numeric column `{column}` at line {line}")]
    NonFinite {
        column: String,
        line: u64,
        value: String,
    },
    #[error("column `{column}` has {found} rows, expected {expected}")]
    ColumnLength {
        column: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("unknown feature type `{0}`")]
    UnknownFeatureType(String),
    #[error("column `{column}` assigned to both `{first}` and `{second}`")]
    ConflictingType {
        column: String,
        first: String,
        second: String,
    },
    #[error("selector resolves to an empty set of columns")]
    EmptySelection,
    #[error("column `{0}` is categorical; this step needs numeric input")]
    NotNumeric(String),
    #[error("column `{0}` is not categorical")]
    NotCategorical(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),
    #[error("zero variance")]
    ZeroVariance,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no features remain")]
    NoFeaturesRemain,
    #[error("subgroup: {0}")]
    Subgroup(String),
    #[error("training fold holds a single class `{0}`")]
    SingleClass(String),
    #[error("unknown step kind `{0}`")]
    UnknownKind(String),
    #[error("unknown parameter `{param}` for step kind `{kind}`")]
    UnknownParameter { kind: String, param: String },
    #[error("model must be final step")]
    ModelNotFinal,
    #[error("pipeline has no model step")]
    MissingModel,
    #[error("empty hyperparameter grid for `{0}`")]
    EmptyGrid(String),
    #[error("hyperparameter grid for `{0}` is not resolved to a single value")]
    UnresolvedGrid(String),
    #[error("unknown step `{0}`")]
    UnknownStep(String),
    #[error("model step not preprocessable")]
    ModelNotPreprocessable,
    #[error("step `{step}`: {source}")]
    Step {
        step: String,
        #[source]
        source: Box<Error>,
    },
    #[error("repeat {repeat}, fold {fold}: {source}")]
    Fold {
        repeat: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("inner fold {fold}: {source}")]
    InnerFold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("cv scheme: {0}")]
    Scheme(String),
    #[error("metric: {0}")]
    Metric(String),
    #[error("fold plan mismatch: {0}")]
    FoldPlanMismatch(String),
    #[error("{0} were not retained")]
    NotRetained(&'static str),
    #[error("out of range: {0}")]
    OutOfRange(String),
}

impl Error {
    pub(crate) fn in_step(self, step: &str) -> Error {
        Error::Step {
            step: step.to_string(),
            source: Box::new(self),
        }
    }

    /// Strips `Step`/`Fold`/`InnerFold` context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. }
            | Error::Fold { source, .. }
            | Error::InnerFold { source, .. } => source.root(),
            other => other,
        }
    }
}

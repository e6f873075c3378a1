use cvforge::Error;

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_CV: i32 = 4;
pub const EXIT_PLAN_MISMATCH: i32 = 5;
pub const EXIT_NOT_RETAINED: i32 = 6;

/// A failure with the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self::new(EXIT_DATA, message)
    }

    /// A library error, classified by its root cause and prefixed with
    /// `context` when non-empty.
    pub fn from_core(context: &str, err: Error) -> Self {
        let message = if context.is_empty() {
            err.to_string()
        } else {
            format!("{context}: {err}")
        };
        Self::new(exit_code(&err), message)
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("cannot write {}: {err}", path.display()))
    }
}

/// Fold-scoped failures are runtime errors regardless of cause; otherwise
/// the root cause decides.
pub fn exit_code(err: &Error) -> i32 {
    if matches!(err, Error::Fold { .. } | Error::InnerFold { .. }) {
        return EXIT_CV;
    }
    match err.root() {
        Error::Io { .. }
        | Error::Csv(_)
        | Error::NoHeader
        | Error::RaggedRow { .. }
        | Error::DuplicateColumn(_)
        | Error::EmptyColumnName(_)
        | Error::MissingValue { .. }
        | Error::NotParsable { .. }
        | Error::NonFinite { .. }
        | Error::ColumnLength { .. }
        | Error::UnknownColumn(_)
        | Error::ConflictingType { .. }
        | Error::NotNumeric(_)
        | Error::NotCategorical(_) => EXIT_DATA,
        Error::UnknownKind(_)
        | Error::UnknownParameter { .. }
        | Error::UnknownFeatureType(_)
        | Error::ModelNotFinal
        | Error::MissingModel
        | Error::EmptyGrid(_)
        | Error::UnresolvedGrid(_)
        | Error::InvalidParameter(_)
        | Error::Metric(_)
        | Error::UnknownStep(_)
        | Error::ModelNotPreprocessable => EXIT_CONFIG,
        Error::FoldPlanMismatch(_) => EXIT_PLAN_MISMATCH,
        Error::NotRetained(_) | Error::OutOfRange(_) => EXIT_NOT_RETAINED,
        _ => EXIT_CV,
    }
}

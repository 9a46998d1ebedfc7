use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the models and their file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    /// A record violates a field constraint. `record` names the offending entry.
    #[error("invalid {record}: field `{field}` {message}")]
    Validation {
        record: String,
        field: String,
        message: String,
    },

    #[error("duplicate language id `{0}`")]
    DuplicateId(String),

    #[error("unknown language `{0}`")]
    UnknownLanguage(String),

    #[error("similarity weights must sum to 1 (got {sum})")]
    WeightNormalization { sum: f64 },

    #[error("missing pair components for: {}", .0.iter().map(|(s, t)| format!("{s}->{t}")).collect::<Vec<_>>().join(", "))]
    MissingPairs(Vec<(String, String)>),

    #[error("rank {rank} outside 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient data: {observations} observations for {parameters} free parameters")]
    InsufficientData { observations: usize, parameters: usize },

    #[error("non-finite objective at observation {index}")]
    NonFiniteObjective { index: usize },

    #[error("infeasible budget: total {total} is below the sum of minima {required}")]
    InfeasibleBudget { total: f64, required: f64 },
}

impl Error {
    pub(crate) fn invalid(record: impl Into<String>, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            record: record.into(),
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    /// `true` for errors caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

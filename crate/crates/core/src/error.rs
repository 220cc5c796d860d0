use std::path::PathBuf;

use thiserror::Error;

/// Failures while loading a snapshot from a manifest and its data files.
#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    ManifestParse { path: PathBuf, message: String },
    #[error("{file}:{line}: {message}")]
    DataFile {
        file: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate table name `{0}`")]
    DuplicateTableName(String),
    #[error("duplicate column `{column}` in table `{table}`")]
    DuplicateColumnName { table: String, column: String },
    #[error("table `{table}` has no column named `{column}`")]
    UnknownColumn { table: String, column: String },
    #[error("declared primary key ({columns}) of table `{table}` {reason}")]
    PrimaryKeyViolation {
        table: String,
        columns: String,
        reason: String,
    },
}

/// Failures of the analysis operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("attribute index {index} out of range for table with {arity} columns")]
    InvalidAttributeIndex { index: usize, arity: usize },
    #[error("attribute set must not be empty")]
    EmptyAttributeSet,
    #[error("invalid dependency: {0}")]
    InvalidDependency(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("table `{0}` has no rows")]
    EmptyTable(String),
    #[error("table `{0}` is not a normalization debt item")]
    NotADebtItem(String),
    #[error("input must not be empty")]
    EmptyInput,
    #[error("missing {metric} metric for table `{table}`")]
    MissingMetric { table: String, metric: &'static str },
    #[error("inconsistent table sets: {0}")]
    InconsistentTableSets(String),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;

/// Either failure kind, for operations that both resolve names and analyze.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

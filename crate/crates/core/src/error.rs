use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Fit,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Config => "config",
            ErrorKind::Data => "data",
            ErrorKind::Fit => "fit",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed cell at row {row}, column {column}: {message}")]
    Malformed {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("missing value at row {row}, column {column}")]
    MissingValue { row: usize, column: usize },
    #[error("non-positive or non-finite price {value} at row {row}, column {column}")]
    NonPositivePrice {
        row: usize,
        column: usize,
        value: f64,
    },
    #[error("duplicate date {0}")]
    DuplicateDate(String),
    #[error("dates are not strictly increasing at position {0}")]
    UnorderedDates(usize),
    #[error(
        "panel too small: {rows} rows and {assets} assets (need at least 2 rows and 4 assets)"
    )]
    PanelTooSmall { rows: usize, assets: usize },
    #[error("header error: {0}")]
    Header(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("non-finite value at ({row}, {column})")]
    NonFinite { row: usize, column: usize },
    #[error("matrix is not symmetric at ({row}, {column})")]
    NotSymmetric { row: usize, column: usize },
    #[error("TMFG needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("sub-covariance on vertices {vertices:?} is not positive definite")]
    SingularBlock { vertices: Vec<usize> },
    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cluster {cluster} has {members} members, minimum is {minimum}")]
    TooFewMembers {
        cluster: usize,
        members: usize,
        minimum: usize,
    },
    #[error("cluster repair failed: {0}")]
    RepairFailed(String),
    #[error("non-finite score at t={t}, k={k}")]
    NonFiniteScore { t: usize, k: usize },
    #[error("invalid state label {label} (have {states} states)")]
    InvalidLabel { label: usize, states: usize },
    #[error("score matrix is empty")]
    EmptyScores,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. }
            | Error::Csv(_)
            | Error::Malformed { .. }
            | Error::MissingValue { .. }
            | Error::NonPositivePrice { .. }
            | Error::DuplicateDate(_)
            | Error::UnorderedDates(_)
            | Error::PanelTooSmall { .. }
            | Error::Header(_)
            | Error::NonFinite { .. } => ErrorKind::Data,
            Error::InvalidConfig(_) | Error::InvalidLabel { .. } => ErrorKind::Config,
            Error::Dimension { .. }
            | Error::NotSymmetric { .. }
            | Error::TooFewVertices(_)
            | Error::SingularBlock { .. }
            | Error::DegenerateCovariance(_)
            | Error::TooFewMembers { .. }
            | Error::RepairFailed(_)
            | Error::NonFiniteScore { .. }
            | Error::EmptyScores => ErrorKind::Fit,
        }
    }
}

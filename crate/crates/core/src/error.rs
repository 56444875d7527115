use std::io;

use thiserror::Error;

use crate::model::DisjunctiveDescriptor;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classes of failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input data, schema or flags.
    Config,
    /// Filesystem or stream failure.
    Io,
    /// The instance admits no descriptor of the requested shape.
    Infeasible,
    /// The exact solver ran out of nodes before proving optimality.
    Budget,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed descriptor: tag id {tag} is outside a universe of {universe} tags")]
    MalformedDescriptor { tag: usize, universe: usize },

    #[error("cluster {0:?} has no items")]
    EmptyCluster(String),

    #[error("items with empty tag sets cannot be described: {}", .items.join(", "))]
    UntaggedItems { items: Vec<String> },

    #[error("item {item:?} has no admissible tag under the candidate mask")]
    InfeasibleUnderMask { item: String },

    #[error("no CNF descriptor exists: {reason}")]
    CnfInfeasible { reason: String },

    #[error("node budget of {budget} exhausted; best incumbent has {} tags", .incumbent.len())]
    BudgetExceeded {
        budget: u64,
        incumbent: DisjunctiveDescriptor,
    },

    #[error("brute-force oracle is capped at {cap} admissible tags, instance has {admissible}")]
    OracleCap { admissible: usize, cap: usize },

    #[error("row {row}: missing value in column {column:?}")]
    MissingValue { row: usize, column: String },

    #[error("column {column:?} has zero variance")]
    ZeroVariance { column: String },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UntaggedItems { .. }
            | Error::InfeasibleUnderMask { .. }
            | Error::CnfInfeasible { .. } => ErrorKind::Infeasible,
            Error::BudgetExceeded { .. } => ErrorKind::Budget,
            Error::Io(_) => ErrorKind::Io,
            Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => ErrorKind::Io,
            _ => ErrorKind::Config,
        }
    }
}

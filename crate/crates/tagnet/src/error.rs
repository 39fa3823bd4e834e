//! Crate-wide error type.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TagnetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("hashtag token is empty after stripping: {raw:?}")]
    EmptyToken { raw: String },

    #[error("graph has no edges; operation requires at least one edge")]
    EdgelessGraph,

    #[error("graph is empty")]
    EmptyGraph,

    /// Power iteration ran out of iterations. Carries the last iterate so
    /// callers can inspect how close it got.
    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last_iterate: BTreeMap<String, f64>,
    },

    #[error("no measures selected")]
    NoMeasures,

    #[error("unknown measure name: {0}")]
    UnknownMeasure(String),

    #[error("partition does not cover vertices: missing {missing:?}")]
    PartitionMismatch { missing: Vec<String> },

    #[error("attribute table does not cover graph vertices: missing {missing:?}")]
    AttributeMismatch { missing: Vec<String> },

    #[error("label sequences cover different items: only in A {only_in_a:?}, only in B {only_in_b:?}")]
    ItemSetMismatch {
        only_in_a: Vec<String>,
        only_in_b: Vec<String>,
    },

    #[error("unknown class id {id} (item {item})")]
    UnknownClass { id: u32, item: String },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("batch {index} is empty")]
    EmptyBatch { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, TagnetError>;

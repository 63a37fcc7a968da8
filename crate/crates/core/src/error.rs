use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph has no edges: {0}")]
    EmptyGraph(PathBuf),

    #[error("node id {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },

    #[error("seed set is empty")]
    EmptySeedSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("exact expectation limited to {limit} edges, graph has {edges}")]
    GraphTooLarge { edges: usize, limit: usize },

    #[error("node {0} does not appear in the walk corpus")]
    NodeNotInCorpus(NodeId),

    #[error("embedding table has no vector for node {0}")]
    MissingEmbedding(NodeId),

    #[error("points lie beyond the reference point: {0:?}")]
    BeyondReference(Vec<[f64; 3]>),

    #[error("all paired differences are zero")]
    AllDifferencesZero,

    #[error("sample too small: {0} non-zero differences, need at least 5")]
    SampleTooSmall(usize),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input data rather than by a failed computation.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::EmptyGraph(_)
                | Error::MissingEmbedding(_)
                | Error::Serde(_)
        )
    }
}

use std::path::PathBuf;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}:{line}: {message}", source_name.as_deref().unwrap_or("<input>"))]
    Parse {
        source_name: Option<String>,
        line: usize,
        message: String,
    },

    #[error("invalid topology: {0}")]
    Topology(#[from] TopologyViolation),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("invalid request {id}: {message}")]
    Request { id: u32, message: String },

    #[error("invalid physics parameters: {0}")]
    Physics(String),

    #[error("invalid cost table: {0}")]
    CostTable(String),

    #[error("invalid route: {0}")]
    Route(String),

    #[error("{0} must be positive")]
    NonPositive(&'static str),

    #[error("invalid program: {0}")]
    Program(String),

    #[error("duplicate name `{0}` in program")]
    NameCollision(String),

    #[error("request {request} has no path from {source_node} to {destination}")]
    Infeasible {
        request: u32,
        source_node: NodeId,
        destination: NodeId,
    },

    #[error("instance too large for brute-force oracle: {0}")]
    OracleTooLarge(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn with_source_name(self, name: &str) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                source_name: Some(name.to_string()),
                line,
                message,
            },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// A violated topology invariant.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyViolation {
    #[error("link {tail}->{head} references undeclared node {node}")]
    DanglingEndpoint {
        tail: NodeId,
        head: NodeId,
        node: NodeId,
    },
    #[error("link {tail}->{head} has non-positive length")]
    NonPositiveLength { tail: NodeId, head: NodeId },
    #[error("duplicate link {tail}->{head}")]
    DuplicateLink { tail: NodeId, head: NodeId },
    #[error("link {node}->{node} is a self loop")]
    SelfLoop { node: NodeId },
}

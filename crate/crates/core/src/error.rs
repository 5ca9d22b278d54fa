use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),

    #[error("invalid node label `{0}`: labels must be non-empty and contain no whitespace, `,` or `#`")]
    InvalidLabel(String),

    #[error("self-loop on `{0}`")]
    SelfLoop(String),

    #[error("graph contains a cycle through edge {from} -> {to}")]
    Cycle { from: String, to: String },

    #[error("node sets differ: {0}")]
    NodeSetMismatch(String),

    #[error("edge {from} {kind} {to} is not present")]
    MissingEdge {
        from: String,
        to: String,
        kind: &'static str,
    },

    #[error("invalid delete operator: {0}")]
    InvalidDelete(String),

    #[error("partially directed graph has no consistent extension")]
    NoConsistentExtension,

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("graph has no edges left to delete")]
    EmptySkeleton,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

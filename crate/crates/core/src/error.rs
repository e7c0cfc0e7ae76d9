use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not an excursion: {0}")]
    NotAnExcursion(String),

    #[error("not a bridge: {0}")]
    NotABridge(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("enumeration cap exceeded: {what} with size {requested} exceeds limit {limit}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid corners: {0}")]
    InvalidCorners(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),

    #[error("empty support: {0}")]
    EmptySupport(String),

    #[error("empty law")]
    EmptyLaw,

    #[error("schema error: {0}")]
    Schema(String),

    #[error("digest mismatch for {path}: recorded {expected}, replayed {actual}")]
    DigestMismatch {
        path: String,
        expected: String,
        actual: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

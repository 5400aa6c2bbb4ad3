//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("required column `{0}` missing from header")]
    MissingColumn(String),

    #[error("{path}:{line}: {msg}")]
    BadResourceRow {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("concreteness score {score} outside the 1..5 norm scale ({path}:{line})")]
    BadScore {
        score: f64,
        path: PathBuf,
        line: usize,
    },

    #[error("emotion lexicon row has {got} flags, expected 8 ({path}:{line})")]
    BadFlagRow {
        got: usize,
        path: PathBuf,
        line: usize,
    },

    #[error("node `{0}` not in graph")]
    NodeNotFound(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("both rating groups must be non-empty with combined size >= 3")]
    DegenerateInput,

    #[error("sample of {requested} words exceeds lexicon vocabulary of {available}")]
    SampleTooLarge {
        requested: usize,
        available: usize,
    },

    #[error("k = {k} exceeds the {available} words available in the norms")]
    KTooLarge { k: usize, available: usize },

    #[error("no frame member matched the concreteness norms")]
    EmptyAfterLookup,

    #[error("null distribution has zero variance; z undefined")]
    ZeroNullVariance,

    #[error("frame is empty")]
    EmptyFrame,

    #[error("endpoint authentication failed: {0}")]
    Auth(String),

    #[error("rate limited by endpoint after retries")]
    RateLimited,

    #[error("cue `{cue}` still malformed after {attempts} attempts")]
    MalformedAfterRetries { cue: String, attempts: usize },

    #[error("need {needed} twins for group `{group}`, only {available} generated")]
    InsufficientTwins {
        group: String,
        needed: usize,
        available: usize,
    },

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("report bundle missing at {0}")]
    MissingReport(PathBuf),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("endpoint error: {0}")]
    Endpoint(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data, 3 endpoint.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnknownGroup(_) => 1,
            Error::Auth(_) | Error::RateLimited | Error::Endpoint(_) => 3,
            _ => 2,
        }
    }
}

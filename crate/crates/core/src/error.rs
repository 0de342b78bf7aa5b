use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("I/O error on {path}: {source}")]
    Path {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed jsonl on line {line}: {message}")]
    MalformedJsonl { line: usize, message: String },

    #[error("empty workload intersection with frequent terms")]
    EmptyWorkload,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{docs} documents cannot be split into {k} clusters")]
    TooFewDocuments { docs: usize, k: usize },

    #[error("pair enumeration limited to {limit} frequent terms, got {terms}")]
    TooManyTerms { terms: usize, limit: usize },

    #[error("degenerate workload: clustered cost is zero")]
    DegenerateWorkload,

    #[error("decode error: {0}")]
    Decode(String),

    #[error("bad index file: {0}")]
    Format(String),

    #[error("bad cluster file: {0}")]
    ClusterFile(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

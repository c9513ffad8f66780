use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}:{line}: duplicate stats key (campaign {campaign_id}, period {period}, bin {bin})")]
    DuplicateKey {
        path: PathBuf,
        line: u64,
        campaign_id: u64,
        period: i64,
        bin: i32,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("timestamp {now} lies outside campaign window [{start}, {end}]")]
    OutsideCampaign { now: i64, start: i64, end: i64 },

    #[error("no campaigns match the experiment filter")]
    EmptySelection,

    #[error("no time cut separates the campaigns into two non-empty sets")]
    InfeasibleSplit,

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("unknown parameter `{param}` for {algorithm}")]
    UnknownParameter { algorithm: String, param: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

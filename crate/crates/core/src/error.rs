use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("SNR undefined for a zero-power signal")]
    UndefinedSnr,

    #[error("carrier loop failed to lock: {0}")]
    NoLock(String),

    #[error("synchronization failed: {0}")]
    SyncFailure(String),

    #[error("signal truncated: {0}")]
    Truncation(String),

    #[error("channel estimation failed: {0}")]
    Estimation(String),

    #[error("equalization failed: {0}")]
    Equalization(String),

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("EVM undefined: reference power is zero")]
    UndefinedEvm,

    #[error("incomplete test: {0}")]
    IncompleteTest(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps the error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

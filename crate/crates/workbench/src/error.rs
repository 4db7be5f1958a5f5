use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] berlu_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output: {0}")]
    Output(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(String),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Short stable tag for the one-line error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(_) => "numeric",
            Error::Io { .. } => "io",
            Error::Output(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
            Error::Usage(_) => "usage",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] momentsys::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Io { .. } => "IoError",
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "UsageError",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

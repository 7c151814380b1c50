use std::path::PathBuf;

/// Errors surfaced by the command-line tool, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Invalid(#[from] ousample_core::Error),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Format(String),

    #[error("{failed} of {total} validation checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// 0 success, 1 usage or validation, 2 estimation failure, 3 I/O or
    /// unreadable input, 4 validation checks failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Invalid(_) => 1,
            CliError::Estimation(_) => 2,
            CliError::Io { .. } | CliError::Format(_) => 3,
            CliError::ChecksFailed { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn write(source: std::io::Error) -> Self {
        CliError::Io {
            path: PathBuf::from("<output>"),
            source,
        }
    }

    pub(crate) fn json(e: serde_json::Error) -> Self {
        CliError::Format(format!("JSON: {e}"))
    }

    pub(crate) fn csv_write(e: csv::Error) -> Self {
        CliError::Format(format!("CSV: {e}"))
    }

    pub(crate) fn csv_read(e: csv::Error) -> Self {
        match e.position() {
            Some(p) => CliError::Format(format!("line {}: {e}", p.line())),
            None => CliError::Format(format!("CSV: {e}")),
        }
    }
}

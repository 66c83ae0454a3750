use std::path::PathBuf;

/// Everything that stops the command line before a verdict is reached,
/// grouped by exit code.
#[derive(thiserror::Error, Debug)]
pub enum CliError {
    /// `--help` or `--version` output; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Input {
        path: String,
        line: Option<u64>,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] heiscone_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Input { .. } | CliError::Core(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn input(path: &str, line: Option<u64>, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}

use std::path::{Path, PathBuf};

/// CLI failure, classified by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric fault: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) | CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Numeric(_) => 4,
            CliError::Stage { source, .. } => source.exit_code(),
        }
    }

    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn format(path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.as_ref().to_path_buf(),
            message: message.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        CliError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

impl From<sdfforge::Error> for CliError {
    fn from(e: sdfforge::Error) -> Self {
        use sdfforge::Error as E;
        if e.is_numeric_fault() {
            return CliError::Numeric(e.to_string());
        }
        match e {
            E::InvalidArgument(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

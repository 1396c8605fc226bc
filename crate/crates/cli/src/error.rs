use thiserror::Error;

/// Failures of a subcommand, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("infeasible pencil configuration: {0}")]
    Infeasible(String),

    #[error("refusing to compute bounds: {0}")]
    NotTpcp(String),

    #[error("ingest failed: {0}")]
    Ingest(String),

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] spectomo::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) => 2,
            CliError::InvalidChannel(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::NotTpcp(_) => 5,
            CliError::Ingest(_) => 6,
            CliError::File { .. } | CliError::Core(_) => 1,
        }
    }

    /// Reclassifies a library error raised while building a channel.
    pub fn channel(e: spectomo::Error) -> Self {
        use spectomo::Error as E;
        match e {
            E::Json(e) => CliError::Malformed(e.to_string()),
            E::Parse { .. } => CliError::Malformed(e.to_string()),
            other => CliError::InvalidChannel(other.to_string()),
        }
    }

    /// Reclassifies a library error raised while fitting.
    pub fn pencil(e: spectomo::Error) -> Self {
        use spectomo::Error as E;
        match e {
            E::PencilConfig(_) | E::UnderDetermined { .. } | E::DegreesOfFreedom { .. } => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

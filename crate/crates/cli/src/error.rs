use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Library(#[from] weakstrat::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("acceptance check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    /// 2 for bad configuration, 3 for capability limits, 4 for failed checks.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Library(weakstrat::Error::Domain(_) | weakstrat::Error::Parse(_)) => 2,
            CliError::Library(weakstrat::Error::Capability(_)) => 3,
            CliError::CheckFailed(_) => 4,
            _ => 1,
        }
    }
}

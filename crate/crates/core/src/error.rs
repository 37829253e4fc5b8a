use thiserror::Error;

/// Errors raised by kernel evaluation, sampling, functionals and audits.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is valid but exceeds a supported size or order.
    #[error("capability error: {0}")]
    Capability(String),

    /// The circulant embedding produced a materially negative eigenvalue.
    #[error("embedding error: eigenvalue {eigenvalue:e} below tolerance (max eigenvalue {max:e})")]
    Embedding { eigenvalue: f64, max: f64 },

    /// A covariance matrix failed to factor.
    #[error("matrix not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

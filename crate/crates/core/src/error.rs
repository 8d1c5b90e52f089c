use thiserror::Error;

use crate::integrator::IntegrationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration that cannot be represented, e.g. finite blockade
    /// shifts with a single-excitation basis.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Integration(#[from] IntegrationError),

    /// The backward recursion for the effective shift hit a zero denominator.
    #[error("singular effective-shift recursion at chain level {level}{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    SingularRecursion { level: usize, context: Option<String> },

    /// A transfer-table query outside the tabulated grid.
    #[error("transfer table query (n0 = {n0}, tg_ratio = {ratio}) outside the tabulated grid")]
    Extrapolation { n0: f64, ratio: f64 },

    #[error("transfer table mismatch: {0}")]
    TableMismatch(String),

    #[error("state basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("density matrix is not a valid state: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violates the invariants of the type or operation that owns it.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Inputs are valid for pricing but the requested quantity has no finite value
    /// there (e.g. d1/d2 at expiry).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("zero pivot at row {pivot} of tridiagonal system")]
    SingularPivot { pivot: usize },

    #[error("time step {step}: zero pivot at row {pivot}")]
    SingularStep { step: usize, pivot: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain { field, reason: reason.into() }
    }

    pub(crate) fn out_of_range(what: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRange { what, detail: detail.into() }
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Degenerate(_) | Error::OutOfRange { .. })
    }
}

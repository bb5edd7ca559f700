use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("capacity exceeded: {requested} unknowns requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("near-singular pivot at index {index} (|pivot| = {magnitude:e})")]
    Singular { index: usize, magnitude: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("quadrature too coarse: {points} points, at least {required} required")]
    Resolution { points: usize, required: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::Numerical(_) | Error::Resolution { .. }
        )
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the model.
    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("angle of arrival {aoa}° lies outside the angular coverage ±{half_coverage}°")]
    OutOfCoverage { aoa: f64, half_coverage: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("incompatible configurations: {0}")]
    Mismatch(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}

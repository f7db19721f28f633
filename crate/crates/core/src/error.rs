use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent measurement: {0}")]
    InconsistentMeasurement(String),

    #[error("underdetermined: {0}")]
    Underdetermined(String),

    #[error("search failed: {0}")]
    Search(String),

    #[error("scan too coarse: maxima at {first} m and {second} m are closer than three coarse steps")]
    ScanTooCoarse { first: f64, second: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("minimum not bracketed: {0}")]
    Unbracketed(String),

    #[error("unmeasurable: {0}")]
    Unmeasurable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

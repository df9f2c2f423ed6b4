use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    /// The domain is outside the closed-form catalog.
    #[error("outside catalog: {0}")]
    Unsupported(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("index {index} out of range for {len} punctures")]
    InvalidIndex { index: usize, len: usize },

    #[error("pole: {0}")]
    Pole(String),

    #[error("map does not extend continuously to {0}")]
    NotExtendable(String),

    #[error("witness does not send the base point to 0 (factor {factor}, |f(z)| = {modulus:e})")]
    BasePoint { factor: usize, modulus: f64 },

    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("inconsistent bounds: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

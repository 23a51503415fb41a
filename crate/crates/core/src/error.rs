use num_bigint::BigUint;

use crate::exactmat::ParseRatError;
use crate::sse::ChainVerdict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index error: {0}")]
    Index(String),

    /// The left Perron vector is not unique (reducible input).
    #[error("ambiguity error: {0}")]
    Ambiguity(String),

    #[error("certificate error: {0}")]
    Certificate(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("positivity error: {0}")]
    Positivity(String),

    #[error("target size {required} exceeds the size cap {cap}")]
    SizeCap { required: BigUint, cap: usize },

    #[error("same-size route unavailable: {0}")]
    SameSizeUnavailable(String),

    #[error("invalid chain: {0}")]
    InvalidChain(Box<ChainVerdict>),

    #[error(transparent)]
    Parse(#[from] ParseRatError),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Error {
        Error::Dimension(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }
}

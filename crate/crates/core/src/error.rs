use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
///
/// Variants split into two families: validation errors (bad inputs, sizes,
/// ranges) and runtime numeric failures. The CLI maps them to distinct exit
/// codes via [`Error::is_validation`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("sieve limit {limit} out of range: must satisfy 2 <= limit <= {ceiling}")]
    SieveLimit { limit: u64, ceiling: u64 },

    #[error("{what} = {value} exceeds the sieve limit {limit}; build tables with limit >= {required}")]
    BeyondSieve {
        what: &'static str,
        value: f64,
        limit: u64,
        required: u64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{mode} backend cannot evaluate zeta at sigma = {sigma}, t = {t}: valid range is {valid}")]
    ZetaRange {
        mode: &'static str,
        sigma: f64,
        t: f64,
        valid: String,
    },

    #[error("quadrature did not converge: achieved relative error {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("empty sample set: {0}")]
    EmptySamples(String),

    #[error("prime-tuple expansion has {terms} terms, above the limit of {limit}")]
    ExpansionTooLarge { terms: u128, limit: u128 },

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for input/configuration problems, false for runtime numeric failures.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Quadrature { .. } | Error::Numeric(_) | Error::Io(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::invalid(msg)
}

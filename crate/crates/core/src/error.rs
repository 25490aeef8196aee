use alloc::string::String;
use core::fmt;

/// Crate-wide error type.
///
/// The variants map onto the failure classes of the public operations:
/// `Domain` for inputs outside an operation's domain, `Config` for invalid
/// run configurations, `Numeric` for solver/quadrature breakdowns and
/// `Invariant` for detected violations of model assumptions (for example a
/// non-monotone impact map during inversion).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    Domain(String),
    /// Invalid simulation or model configuration.
    Config(String),
    /// A numerical method failed to converge or produced a non-finite value.
    Numeric(String),
    /// A model assumption required by the operation does not hold.
    Invariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Invariant(msg) => write!(f, "invariant violation: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

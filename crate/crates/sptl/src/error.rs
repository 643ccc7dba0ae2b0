use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("pole encountered: {0}")]
    Pole(String),
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("{0} is not a discriminant (must be nonzero and 0 or 1 mod 4)")]
    NotADiscriminant(i64),
    #[error("local Euler factor degenerates: {0}")]
    LocalFactorPole(String),
    #[error("series or quadrature failed to converge: {0}")]
    Convergence(String),
    #[error("weight {0} is not in the one-dimensional list {{12,16,18,20,22,26}}")]
    UnsupportedWeight(u32),
    #[error("degenerate discriminant 0 at t = {t}, m = {m}: use the closed degenerate term")]
    DegenerateDiscriminant { t: i64, m: u64 },
    #[error("sum truncation exceeded the budget: {0}")]
    Truncation(String),
    #[error("test-function support beta = {0} exceeds the validity range (beta <= {1})")]
    SupportTooWide(f64, f64),
    #[error("prime range {0} exceeds the sieve budget {1}")]
    SieveRange(u64, u64),
    #[error("model out of range: {0}")]
    ModelRange(String),
    #[error("sign product is not real: {0}")]
    NonRealSign(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

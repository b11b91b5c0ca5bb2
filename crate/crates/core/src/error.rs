use thiserror::Error;

/// Errors raised by the statistical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("noncausal AR: polynomial has a root of modulus {modulus:.6} (must exceed 1)")]
    NoncausalAr { modulus: f64 },

    #[error("underdetermined trend: {len} observations for a trend of order {order}")]
    UnderdeterminedTrend { len: usize, order: usize },

    #[error("ill-conditioned trend basis (condition estimate {condition:.3e})")]
    IllConditionedTrend { condition: f64 },

    #[error("trend order {order} exceeds the configured maximum {max}")]
    TrendOrderTooHigh { order: usize, max: usize },

    #[error("zero residual energy")]
    ZeroResidualEnergy,

    #[error("degenerate residuals")]
    DegenerateResiduals,

    #[error("series too short: {len} observations, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("integration order must be at least 1")]
    ZeroIntegrationOrder,

    #[error("unsupported: integration order {d} with a negative unit root")]
    UnsupportedNegativeMultiIntegration { d: usize },

    #[error("wrong null table: {0}")]
    WrongNullTable(String),

    #[error("table not built: {0}")]
    TableNotBuilt(String),

    #[error("checksum failure in {path}: table is corrupt, rebuild it")]
    ChecksumMismatch { path: String },

    #[error("malformed table file {path}: {reason}")]
    MalformedTable { path: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

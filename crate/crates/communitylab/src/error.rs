use thiserror::Error;

/// Crate-wide error type.
///
/// Everything user-triggerable (bad parameters, over-budget requests,
/// malformed files) is reported through this enum; panics are reserved for
/// internal invariant violations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),

    #[error("duplicate interpolation point x = {0}")]
    DuplicateInterpolationPoint(u64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget exceeded: needed about {needed} units, limit {limit} (set COMMUNITYLAB_BUDGET to raise)")]
    BudgetExceeded { needed: u128, limit: u128 },

    #[error("partition failed after {attempts} attempts: {last_failure}")]
    PartitionFailed { attempts: u32, last_failure: String },

    #[error("labeling is partial: vertex {0} has no label")]
    PartialLabeling(usize),

    #[error("cannot serialize this graph: {0}")]
    Unserializable(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

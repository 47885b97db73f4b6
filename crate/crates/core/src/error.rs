use thiserror::Error;

/// Errors raised by construction and verification routines.
///
/// Rows, columns, symbols and block indices carried by the variants are
/// 0-based, matching the library API.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition sums to {got}, expected {expected}")]
    PartitionSum { expected: usize, got: usize },

    #[error("not a latin square: {0}")]
    NotLatin(String),

    #[error("block {block} is not a subsquare: cell ({row}, {col}) holds symbol {symbol}")]
    NotSubsquare {
        block: usize,
        row: usize,
        col: usize,
        symbol: usize,
    },

    #[error("blocks {first} and {second} are not disjoint ({what})")]
    NotDisjoint {
        first: usize,
        second: usize,
        what: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no realization exists: {0}")]
    Nonexistent(String),

    #[error("infeasible degree targets: {0}")]
    Infeasible(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;

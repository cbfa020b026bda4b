use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a permutation of 0..{n}: {detail}")]
    NotPermutation { n: usize, detail: String },

    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("1-factors share an edge at u{0}")]
    SharedEdge(usize),

    #[error("order {0} must be odd and at least {1}")]
    BadOrder(usize, usize),

    #[error("order {0} exceeds the supported maximum {1}")]
    OrderTooLarge(usize, usize),

    #[error("partial factorisation is not perfect")]
    NotPerfect,

    #[error("partial factorisation has {got} factors, need {need}")]
    Length { got: usize, need: usize },

    #[error("not a 1-factorisation of K_{vertices}: {detail}")]
    NotFactorisation { vertices: usize, detail: String },

    #[error("not a Latin square: {0}")]
    NotLatin(String),

    #[error("rows {0} and {1} must differ")]
    SameRow(usize, usize),

    #[error("invalid conjugate label {0:?}")]
    BadConjugate(String),

    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),

    #[error("first row does not close to a Latin square: {0}")]
    BadFirstRow(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("shard index {index} out of range for {total} shards")]
    BadShard { index: usize, total: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

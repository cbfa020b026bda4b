use std::path::Path;

use thiserror::Error;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }

    pub(crate) fn parse(path: &Path, e: p1f_core::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}

/// Core errors raised by bad parameters (orders, primes, first rows) are
/// usage errors; everything else read from files is data.
impl From<p1f_core::Error> for CliError {
    fn from(e: p1f_core::Error) -> Self {
        use p1f_core::Error as E;
        match e {
            E::BadOrder(..)
            | E::OrderTooLarge(..)
            | E::NotOddPrime(_)
            | E::BadFirstRow(_)
            | E::BadShard { .. }
            | E::BadConjugate(_) => CliError::Usage(e.to_string()),
            E::Overflow(_) => CliError::Internal(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

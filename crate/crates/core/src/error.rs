use thiserror::Error;

/// Errors raised by instance generation, detection and annealing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Exhaustive enumeration refused because `n` exceeds the guard.
    #[error("problem size n = {n} exceeds the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid gap profile: {0}")]
    InvalidProfile(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error("calibration did not reach target {target:e}; best K = {best_k} with upper bound {best_upper:e}")]
    Calibration {
        target: f64,
        best_k: usize,
        best_upper: f64,
    },

    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Largest `n` for which 2^n-sized enumeration or state vectors are allowed.
pub const MAX_ENUM_N: usize = 20;

pub(crate) fn check_enum_guard(n: usize) -> Result<()> {
    if n > MAX_ENUM_N {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ENUM_N,
        });
    }
    Ok(())
}

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("variable {var} out of range (formula has {num_vars} variables)")]
    VarOutOfRange { var: u32, num_vars: usize },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("model has {got} values, formula has {expected} variables")]
    ModelSize { expected: usize, got: usize },
    #[error("model violates hard clause {clause}")]
    HardViolated { clause: usize },
    #[error("enumeration overflow: more than {cap} models")]
    EnumerationOverflow { cap: usize },
    #[error("instance has {num_vars} variables, brute-force cap is {cap}")]
    OracleCap { num_vars: usize, cap: usize },
    #[error("time limit exceeded")]
    Timeout,
    #[error("inconsistent solution: {0}")]
    Inconsistent(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("solver process: {0}")]
    Process(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

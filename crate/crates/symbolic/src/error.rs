use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable list: {0}")]
    InvalidVariables(String),
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("matrix shape mismatch: expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("minor size {r} out of range for a {rows}x{cols} matrix")]
    MinorSize { r: usize, rows: usize, cols: usize },
    #[error("determinant of a non-square {rows}x{cols} matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("Buchberger exceeded the pair budget of {budget}")]
    PairBudget { budget: usize },
    #[error("malformed data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shift space: {0}")]
    InvalidShift(String),
    #[error("not topologically mixing: transition matrix is not primitive")]
    NotMixing,
    #[error("inadmissible word: transition {from}->{to} at position {position}")]
    Inadmissible { from: u8, to: u8, position: usize },
    #[error("no admissible bridge of length {length} from {from} to {to}")]
    NoBridge { from: String, to: String, length: usize },
    #[error("enumeration cap exceeded: need words of length {required}, cap is {cap}")]
    CapExceeded { required: usize, cap: usize },
    #[error("budget exceeded: {what} needs {required}, budget is {budget}")]
    Budget { what: &'static str, required: u64, budget: u64 },
    #[error("resolution must be a power of 1/2, got {0}")]
    NonDyadic(f64),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("subadditivity violated: a_{n_plus_k} = {lhs} > a_{n} + a_{k} = {rhs}")]
    Subadditivity { n: usize, k: usize, n_plus_k: usize, lhs: f64, rhs: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("Lyapunov series tail bound {tail} above tolerance {tolerance} at window {window}")]
    TailTooLarge { tail: f64, tolerance: f64, window: usize },
    #[error("measures not MLE-distinguished: a = {a}, b = {b}")]
    NotDistinguished { a: f64, b: f64 },
    #[error("empty candidate pool: {0}")]
    EmptyPool(String),
    #[error("invalid pseudo-orbit: {0}")]
    InvalidPseudoOrbit(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
}

pub type Result<T> = std::result::Result<T, Error>;

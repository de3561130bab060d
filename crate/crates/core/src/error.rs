use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("emptiness certificate inconclusive at degree cap {cap}: {detail}")]
    Inconclusive { cap: u32, detail: String },

    #[error("position violation: members {labels:?} have a common zero")]
    PositionViolation { labels: Vec<String> },

    #[error("replacement search failed at step t={step} after {retries} retries (partial chain of {} forms)", partial.len())]
    SearchFailure {
        step: usize,
        retries: usize,
        partial: Vec<String>,
    },

    #[error("entries are linearly dependent: {combination}")]
    Dependence { combination: String },

    #[error("curve degeneracy: {0}")]
    CurveDegeneracy(String),

    #[error("nondegeneracy failure: {0}")]
    Nondegeneracy(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("defect undefined: {0}")]
    UndefinedDefect(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("not an immersion: {0}")]
    NotAnImmersion(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational {0:?}")]
    BadRational(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("unknown alphabet {0:?}")]
    UnknownAlphabet(String),
    #[error("unknown symbol {symbol:?} in alphabet {alphabet:?}")]
    UnknownSymbol { alphabet: String, symbol: String },
    #[error("not a conditional distribution at input [{input}]: {reason}")]
    NotADistribution { input: String, reason: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("alphabet name collision: {0:?}")]
    NameCollision(String),
    #[error("conditioning event has zero mass at input [{input}]")]
    ZeroMass { input: String },
    #[error("wrong arity: expected {expected}, got {got}")]
    Arity { expected: String, got: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("strategy is not non-signaling: {0}")]
    Signaling(String),
    #[error("query order violates causality: {0}")]
    QueryOrder(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program has {vars} variables, above the cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::fmt;

/// A parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node set or relation belongs to a universe of {found} nodes, expected {expected}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("limit exceeded: {what} needs {needed}, cap is {cap}")]
    Limit { what: &'static str, needed: u128, cap: u128 },
    #[error("presentation rejected: {0}")]
    Invalid(String),
    #[error("set-family characterizations disagree: {0}")]
    Disagreement(String),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, message: String) -> SyntaxError {
        SyntaxError { line, col, message }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("sort error at {line}:{col}: {message}")]
    Sort { line: usize, col: usize, message: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("term is not closed: free variables {0}")]
    OpenTerm(String),
    #[error("rank {found} exceeds the domain rank {limit}")]
    RankOverflow { found: usize, limit: usize },
    #[error("unbound variable `{0}` in interpretation environment")]
    Unbound(String),
    #[error("function table is not monotone")]
    NotMonotone,
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
    #[error("rank {rank} domain has more than {limit} elements")]
    DomainTooLarge { rank: usize, limit: usize },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

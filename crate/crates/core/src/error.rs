use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("signature violation: {0}")]
    Signature(String),
    #[error("undeclared constant @{0}")]
    UndeclaredConstant(String),
    #[error("theory mismatch: {0}")]
    TheoryMismatch(String),
    #[error("no binding for free variable {0}")]
    MissingBinding(String),
    #[error("unknown tag {0}")]
    UnknownTag(String),
    #[error("arity mismatch for {tag}: expected {expected}, got {got}")]
    ArityMismatch { tag: String, expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{what} did not stabilize within {iterations} iterations")]
    CapExceeded { what: String, iterations: usize },
    #[error("not an equivalence relation: {0} fails")]
    NotEquivalence(String),
    #[error("X occurs negatively in the fixed-point body: {0}")]
    Positivity(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("monoid law check failed: {0}")]
    LawFailure(String),
    #[error("malformed register automaton: {0}")]
    RegisterAutomaton(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn shape(message: impl Into<String>) -> Self {
        Error::Shape(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::signatures::Kind;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate relation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("relation symbol `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("universe must contain at least one element")]
    EmptyUniverse,
    #[error("duplicate universe element `{0}`")]
    DuplicateElement(String),
    #[error("unknown universe element `{0}`")]
    UnknownElement(String),
    #[error("element index {index} out of range for universe of size {size}")]
    ElementOutOfRange { index: usize, size: usize },
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("relation `{symbol}` has arity {expected} but was given {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{kind} structures require the signature {expected}, found {found}")]
    SignatureMismatch {
        kind: Kind,
        expected: String,
        found: String,
    },
    #[error("structure is not a valid {kind}: {count} axiom violation(s), first: {first}")]
    InvalidStructure {
        kind: Kind,
        count: usize,
        first: String,
    },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(String),
    #[error("variable `{0}` is unbound in the assignment")]
    UnboundVariable(String),
    #[error("systems are over different variable lists: {left:?} vs {right:?}")]
    VariableMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    #[error("search space of {size}^{vars} assignments is too large")]
    SearchSpaceTooLarge { size: usize, vars: usize },
    #[error("the repeating part of a power element must be nonempty")]
    EmptyCycle,
    #[error("a staircase generator must be nonempty")]
    EmptyGenerator,
    #[error("indices start at 1; 0 is not a valid {0}")]
    ZeroIndex(&'static str),
    #[error("point has {found} coordinates but the system has {expected} variables")]
    PointLength { expected: usize, found: usize },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

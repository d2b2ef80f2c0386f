use thiserror::Error;

use crate::seqcore::Symmetry;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("sequence is not {expected:?}: entry {index} breaks the symmetry")]
    SymmetryViolation { expected: Symmetry, index: usize },

    #[error("invalid equivalence operation: {0}")]
    InvalidOp(String),

    #[error("invalid subproblem: {0}")]
    InvalidSubproblem(String),

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("solver contract violation: {0}")]
    ContractViolation(String),

    #[error("quadruple is not a set of best matrices (first failing shift {shift}, value {value})")]
    Unverified { shift: usize, value: i64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

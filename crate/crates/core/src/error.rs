use thiserror::Error;

use crate::exactnum::Interval;

/// Errors surfaced by the library. Every variant maps to one CLI exit code
/// through [`Error::exit_code`].
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("index {index} out of range (sequence has {len} terms)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undecided at refinement cap: {what} (best enclosure {best})")]
    UndecidedAtCap { what: String, best: Box<Interval> },

    #[error("insufficient branching: requested {requested}, only {achieved} feasible prefixes of length {depth}")]
    InsufficientBranching {
        requested: usize,
        achieved: usize,
        depth: usize,
    },

    #[error("budget unreachable: found {found} of {requested} admissible special indices up to index {window}; try a larger window")]
    BudgetUnreachable {
        requested: usize,
        found: usize,
        window: usize,
    },

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// 1 for domain-type failures, 2 for malformed input, 3 for undecided
    /// comparisons.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) => 2,
            Error::UndecidedAtCap { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

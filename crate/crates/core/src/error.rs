use std::fmt;

/// Errors produced by the reference predicates, enumerators, searches and
/// the grading harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An instance broke one of its structural invariants.
    #[error("invalid instance: `{field}` {reason}")]
    Validation { field: String, reason: String },

    /// An exhaustive enumeration was asked to run past its bound.
    #[error("{what} has size {size}, which exceeds the enumeration bound {bound}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("graph contains a cycle: {}", .cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },

    /// The bounded witness search exhausted its space.
    #[error("no instance of size {n} violates exactly {target}")]
    NotFound { target: String, n: usize },

    #[error("failed to launch `{command}`: {reason}")]
    Launch { command: String, reason: String },

    #[error("cannot aggregate patterns from different problems ({first} and {second})")]
    MixedProblems { first: String, second: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    /// A shipped artifact broke one of its own guarantees.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl fmt::Display) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

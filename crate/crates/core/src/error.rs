use thiserror::Error;

use crate::report::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("unknown color {0}")]
    UnknownColor(usize),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("arrow `{0}` is a loop")]
    Loop(String),
    #[error("quiver has an oriented cycle through `{0}`")]
    Cycle(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("validation failed: {0}")]
    Invalid(ValidationReport),
    #[error("`{0}` is not defined on isolated roots")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors that signal a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

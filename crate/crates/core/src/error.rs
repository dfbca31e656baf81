use thiserror::Error;

use crate::automaton::{Digit, State};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid letter {0:?}: expected '0' or '1'")]
    InvalidLetter(char),

    #[error("invalid digit {0:?}: expected one of 0..4")]
    InvalidDigit(char),

    #[error("malformed code {text:?}: {reason}")]
    CodeSyntax { text: String, reason: String },

    #[error("word is not the image of the Thue-Morse morphism (block at {position})")]
    NotMuImage { position: usize },

    #[error("depth {depth} exceeds the exhaustive search limit of {max}")]
    DepthTooLarge { depth: usize, max: usize },

    #[error("depth must be at least 1")]
    DepthTooSmall,

    #[error("{state}{digit} is a defined transition; emptiness does not apply")]
    TransitionPresent { state: State, digit: Digit },

    #[error("{state}{digit} not refuted at depth {depth}")]
    NotRefutedAtDepth { state: State, digit: Digit, depth: usize },

    #[error("prefix {prefix:?} determines more than one factor prefix: {first} and {second}")]
    AmbiguityDetected { prefix: String, first: Digit, second: Digit },

    #[error("word does not begin any infinite overlap-free word (prefix {prefix:?})")]
    NotInTable { prefix: String },

    #[error("code ends in 0 and needs a tail marker ;1 or ;3")]
    TailRequired,

    #[error("code has no digits")]
    EmptyCode,

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("{what} = {value} exceeds the limit {max}")]
    LimitExceeded { what: &'static str, value: u64, max: u64 },

    #[error("source cannot supply position {position}")]
    InsufficientPrefix { position: usize },

    #[error("horizon {horizon} is below the minimum {min}")]
    HorizonTooShort { horizon: usize, min: usize },

    #[error("kernel exploration exceeded {max_nodes} nodes")]
    KernelOverflow { max_nodes: usize },

    #[error("automaton disagrees with the decoded word at position {position}")]
    VerificationFailed { position: usize },

    #[error("horizon {horizon} ends before the differing span starting at {start}")]
    HorizonTooSmall { horizon: usize, start: usize },

    #[error("position {position} out of range for word of length {len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("{0}")]
    Precondition(&'static str),
}

impl Error {
    /// Internal consistency failures, as opposed to bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::AmbiguityDetected { .. }
                | Error::KernelOverflow { .. }
                | Error::VerificationFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the engine.
///
/// Falsified checks are not errors; they come back as reports with
/// `holds == false` and a counterexample.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("unknown sequence {0:?}")]
    UnknownSequence(String),

    #[error("unknown shuffling method {0:?}")]
    UnknownMethod(String),

    #[error("invalid custom method: {0}")]
    InvalidMethod(String),

    #[error("rule violation at operation {index}: {kind}")]
    RuleViolation { index: usize, kind: Violation },

    #[error("iteration does not finish in (ε, ε, out): {0}")]
    IncompleteIteration(String),

    #[error("state budget of {budget} memo entries exceeded")]
    BudgetExceeded { budget: usize },

    #[error("{what}: n = {n} exceeds the configured limit {limit}")]
    LimitExceeded {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("missing table entry for n = {0}")]
    MissingTableEntry(usize),

    #[error("{what} = {value} is not divisible by {divisor}")]
    Indivisible {
        what: String,
        value: String,
        divisor: u32,
    },
}

/// Which device rule an operation broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    PushEmptyInput,
    PopEmptyDevice,
    ShuffleTooSmall,
    ShuffleNotInFamily,
    ConsecutiveShuffle,
    PopAllNotAllowed,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Violation::PushEmptyInput => "push with empty input",
            Violation::PopEmptyDevice => "pop with empty device",
            Violation::ShuffleTooSmall => "shuffle needs at least 2 elements in the device",
            Violation::ShuffleNotInFamily => "shuffle permutation is not in the method's family",
            Violation::ConsecutiveShuffle => "two consecutive shuffle operations",
            Violation::PopAllNotAllowed => "popall is only available when every pop unloads",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;

/// Errors produced by the counting machinery.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("pattern too short: length {len}, need at least 2")]
    PatternTooShort { len: usize },

    #[error("letters must be positive integers")]
    ZeroLetter,

    #[error("cannot parse word {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("letter {letter} outside the alphabet [1..{k}]")]
    LetterOutOfRange { letter: u32, k: u32 },

    #[error("pattern set must not be empty")]
    EmptyPatternSet,

    #[error("automaton exceeds the state limit of {limit} live states")]
    StateLimit { limit: usize },

    #[error("enumeration of {words} words exceeds the budget of {budget}; use transfer-matrix counting for avoiders")]
    WordBudget { words: u128, budget: u64 },

    #[error("permutation length {n} exceeds the enumeration cap {cap}")]
    PermCap { n: u32, cap: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing count: {0}")]
    MissingCount(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),
}

impl Error {
    /// True for budget, cap and state-limit failures.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::StateLimit { .. } | Error::WordBudget { .. } | Error::PermCap { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Every failure the library reports. Variants carry a rendered description
/// rather than borrowed data so errors can cross thread and API boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("query of length {len} exceeds the language horizon {horizon}")]
    HorizonExceeded { len: usize, horizon: usize },
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("word {0} is not in the language")]
    NotInLanguage(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("return words to {0} are not certified at this horizon")]
    Uncertified(String),
    #[error("no extension-graph template matches: {0}")]
    NoTemplate(String),
    #[error("class condition violated: {0}")]
    ConditionViolated(String),
    #[error("connection at step {0}")]
    Connection(usize),
    #[error("return time exceeded the cap of {0} steps")]
    StepCap(usize),
    #[error("dendricity audit failed: {0}")]
    AuditFailed(String),
    #[error("morphism {0} has no decomposition of the form pi.sigma.pi'")]
    NotDecomposable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

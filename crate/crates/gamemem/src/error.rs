use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("state `{0}` has no outgoing edge")]
    BlockingState(String),
    #[error("dangling reference: {0}")]
    DanglingEdge(String),
    #[error("state `{0}` has fewer than two outgoing edges")]
    NotAChoiceState(String),
    #[error("edge partition must be a non-empty proper subset of the outgoing edges")]
    BadPartition,
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("empty language: {0}")]
    EmptyLanguage(String),
    #[error("relation `{0}` is not qualitative")]
    NotQualitative(String),
    #[error("arena is not one-player: {0}")]
    NotOnePlayer(String),
    #[error("equilibrium certificates cover different state sets")]
    CertificateMismatch,
    #[error("cover violation: {0}")]
    CoverViolation(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, GameError>;

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("undeclared symbol `{name}` at byte {pos}")]
    UndeclaredSymbol { name: String, pos: usize },
    #[error("square of odd variable `{name}` at byte {pos}")]
    OddSquare { name: String, pos: usize },
    #[error("jet order {order} exceeds the configured limit {limit}")]
    JetOrderOverflow { order: u32, limit: u32 },
    #[error("base index {index} out of range for base dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation needs a metric on the Lie algebra")]
    MissingMetric,
    #[error("reduction did not terminate within {steps} steps")]
    ReductionLimit { steps: usize },
    #[error("invalid PDE system: {0}")]
    InvalidSystem(String),
    #[error("density depends explicitly on base coordinate `{0}`")]
    ExplicitBaseDependence(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("gauge element is singular: {0}")]
    SingularGauge(String),
    #[error("functional is not a cocycle")]
    NotACocycle,
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("incomplete setup: {0}")]
    IncompleteSetup(String),
    #[error("input is not alternating: {0}")]
    NonAlternating(String),
    #[error("representation: {0}")]
    Representation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors shared by every subsystem of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("point is not valid in the presented system: {0}")]
    Validity(String),
    #[error("mixed-system arguments: {0}")]
    TypeMismatch(String),
    #[error("pseudo-orbit delta {delta} exceeds the shadowing modulus {modulus}")]
    Modulus { delta: String, modulus: String },
    #[error("operation requires a mixing (primitive) presentation: {0}")]
    MixingRequired(String),
    #[error("no chain of the requested length {length} exists")]
    InfeasibleLength { length: usize },
    #[error("construction infeasible: {0}")]
    Infeasible(String),
    #[error("specification request malformed: {0}")]
    Request(String),
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("prefix known only to depth {have}, need {need}")]
    Depth { have: usize, need: usize },
    #[error("probe test indecisive at step {step}: point is not in the subsystem")]
    NotInSubsystem { step: usize },
    #[error("stationary vector is ambiguous: chain is reducible")]
    Reducible,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

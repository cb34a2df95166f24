use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("invalid particle configuration: {0}")]
    InvalidConfig(String),

    #[error("rate parameters rejected: {0}")]
    InvalidRates(String),

    #[error("insertion precondition violated: {0}")]
    InsertionRejected(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("operator composition diverges: {0}")]
    DivergentComposition(String),

    #[error("repeated pole at {0}; perturb the parameters to make them distinct")]
    RepeatedPole(String),

    #[error("regime predicate failed: {0}")]
    RegimeViolation(String),

    #[error("Fredholm window did not stabilize: {0}")]
    NoStabilization(String),

    #[error("argument outside the validity region: {0}")]
    OutsideValidity(String),

    #[error("malformed configuration: {0}")]
    BadConfig(String),
}

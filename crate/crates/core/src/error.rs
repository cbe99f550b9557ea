use thiserror::Error;

/// Errors raised by the exact computation layers.
///
/// Every failure is a mathematical precondition violation or a closure
/// failure of the coefficient algebra; there are no approximation paths.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no closed form in the coefficient algebra: {0}")]
    NoClosedForm(String),
    #[error("pole at evaluation point {0}")]
    PoleAtPoint(String),
    #[error("singular Wronskian matrix")]
    SingularWronskian,
    #[error("expected {expected} elements, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("matrix does not have full column rank")]
    RankDeficient,
    #[error("no fundamental system available: {0}")]
    MissingFundamentalSystem(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("boundary problem is not regular: {0}")]
    NotRegular(String),
    #[error("boundary problem is not semi-regular")]
    NotSemiRegular,
    #[error("factors do not multiply back to the problem operator")]
    BadFactorization,
    #[error("incompatible operator shape: {0}")]
    OrderMismatch(String),
    #[error("no admissible exceptional space in the candidate pool")]
    SearchExhausted,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("operands belong to different fields (GF({left}) vs GF({right}))")]
    FieldMismatch { left: u64, right: u64 },

    #[error("duplicate evaluation point {0}")]
    DuplicateEvaluationPoint(u64),

    #[error("interpolation needs at least one point")]
    EmptyInterpolation,

    #[error("block shape mismatch: expected {expected:?}, found {found:?}")]
    BlockShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("{scheme} needs at least {needed} workers, got {got}")]
    TooFewWorkers {
        scheme: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("field GF({modulus}) too small: modulus must exceed {needed}")]
    FieldTooSmall { modulus: u64, needed: usize },

    #[error("worker index {index} out of range for {workers} workers")]
    WorkerOutOfRange { index: usize, workers: usize },

    #[error("insufficient results: need {needed}, got {got}")]
    InsufficientResults { needed: usize, got: usize },

    #[error("decoding system is singular for the received subset")]
    SingularDecodeSystem,

    #[error("exponents (α={alpha}, β={beta}, θ={theta}) do not separate the output blocks")]
    NonSeparableExponents { alpha: u64, beta: u64, theta: u64 },

    #[error("invalid bilinear construction: {0}")]
    InvalidConstruction(String),

    #[error("construction of rank {0} exceeds the size limit")]
    ConstructionTooLarge(u64),

    #[error("too many errors: no consistent decoding found")]
    TooManyErrors,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

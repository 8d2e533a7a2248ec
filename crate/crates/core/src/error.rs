use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// `coord` is 0-based; the message counts from 1 like the index set [κ].
    #[error("coordinate {} is not a unit", coord + 1)]
    NotAUnit { coord: usize },
    #[error("polynomial is zero")]
    EmptyPolynomial,
    #[error("variable index {index} lies outside the partition")]
    IndexOutsidePartition { index: usize },
    #[error("schema error at {path}: {msg}")]
    SchemaError { path: String, msg: String },
    #[error("partition violation at {gate}: {msg}")]
    PartitionViolation { gate: String, msg: String },
    #[error("formula is not fanin-normalized")]
    NotNormalized,
    #[error("no separating weight vector with entries up to {max_weight}")]
    SearchExhausted { max_weight: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("coordinate {} is identically zero", coord + 1)]
    NoCoordinateWitness { coord: usize },
    #[error("truncation basis differs from full basis for factor {factor}")]
    BasisMismatch { factor: usize },
    #[error("field too small: need more than {needed} elements, prime is {prime}")]
    FieldTooSmall { needed: u128, prime: u64 },
    #[error("no shift parameter found among {tried} candidates")]
    NoAlphaFound { tried: u64 },
    #[error("not a dual form: {0}")]
    NotADualForm(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("{0} is not a prime below 2^63")]
    InvalidPrime(u64),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

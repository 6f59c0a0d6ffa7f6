use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be positive, got {0}")]
    NonPositive(i128),

    #[error("expected an odd integer >= 3, got {0}")]
    EvenQ(u64),

    #[error("{what} exceeds the supported bound {bound}")]
    BoundExceeded { what: String, bound: u128 },

    #[error("modulus {0} is not an odd prime power")]
    BadModulus(u64),

    #[error("invalid field specification: {0}")]
    InvalidSpec(String),

    #[error("2 is not a primitive root modulo {0}")]
    NotPrimitiveRoot(u64),

    #[error("undecided: {0}")]
    Undecided(String),

    #[error("field {field} is not 2-regular ({reason})")]
    NotTwoRegular { field: String, reason: String },

    #[error("q = {q} is not admissible for {field}")]
    InadmissibleQ { q: u64, field: String },

    #[error("degree {0} is out of range")]
    NegativeDegree(i64),

    #[error("degree {0} is out of range for this classification")]
    DegreeOutOfRange(i64),

    #[error("w_m is only defined for even m, got m = {0}")]
    OddM(u64),

    #[error("t_n is only defined for odd n, got n = {0}")]
    EvenN(i64),

    #[error("exact window is empty")]
    EmptyWindow,

    #[error("truncation degrees differ ({0} vs {1})")]
    TruncationMismatch(usize, usize),

    #[error("truncation degree {got} is below the required {need}")]
    TruncationTooSmall { got: usize, need: usize },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

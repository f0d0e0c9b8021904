use thiserror::Error;

/// Errors raised anywhere in the engine.
///
/// The variants are grouped by how the CLI reports them: input problems exit
/// with status 2, size and budget refusals with status 3.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unsupported descriptor: {0}")]
    Unsupported(String),

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),

    #[error("element is not a member of the subgroup")]
    NotMember,

    #[error("non-invertible matrix generator")]
    Singular,

    #[error("inconsistent generators: {0}")]
    InconsistentGenerators(String),

    #[error("group of order {order} exceeds the size cap {cap}")]
    SizeCap { order: u64, cap: u64 },

    #[error("estimated work {estimate} exceeds the budget {budget}")]
    Budget { estimate: u128, budget: u128 },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeCap { .. } | Error::Budget { .. } => 3,
            Error::Internal(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

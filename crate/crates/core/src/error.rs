use thiserror::Error;

/// Errors raised by the exact-algebra routines.
///
/// Negative mathematical outcomes (a reducible family, a failed hypothesis,
/// a truncated closure) are values, not errors. This type covers misuse of
/// the API and broken preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("operands live in different fields ({left} vs {right})")]
    MixedField { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("unsupported field tower: {sub} inside {ext}")]
    UnsupportedTower { sub: String, ext: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("polynomial is not monic")]
    NonMonicInput,

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("zero vector has no spin")]
    ZeroVector,

    #[error("structure violation: {0}")]
    StructureViolation(String),

    #[error("search exhausted after {attempts} attempts: {what}")]
    SearchExhausted { what: String, attempts: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error at {line}:{column} near `{token}`: {message}")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },

    #[error("cannot parse `{token}`: {message}")]
    Literal { token: String, message: String },

    #[error("line {line}, column {column}: {source}")]
    Located {
        line: usize,
        column: usize,
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn literal(token: &str, message: impl Into<String>) -> Self {
        Error::Literal {
            token: token.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn shape(message: impl Into<String>) -> Self {
        Error::ShapeMismatch(message.into())
    }
}

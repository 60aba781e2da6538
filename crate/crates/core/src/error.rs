use thiserror::Error;

/// Errors raised by the polynomial, dynamics and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable sets differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },

    #[error("matrix shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("expected a point with {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("too many variables ({0}); at most {max} are supported", max = crate::poly::MAX_VARS)]
    TooManyVariables(usize),

    #[error("exponent {0} exceeds the supported maximum of 255")]
    ExponentOverflow(u32),

    #[error("imaginary residue {0:e} in a quantity that must be real")]
    ImaginaryResidue(f64),

    #[error("matrix `{0}` is not Hermitian")]
    NotHermitian(&'static str),

    #[error("target matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("state `{0}` is not normalized")]
    NotNormalized(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("relaxation order {order} is too small for a polynomial of degree {degree}")]
    RelaxationOrderTooSmall { order: u32, degree: u32 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the phase-space toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: N must be even and at least 2")]
    InvalidDimension(usize),

    #[error("dimension {n} exceeds the cap of {cap} for this operation")]
    DimensionTooLarge { n: usize, cap: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("wigner value at ({q},{p}) has imaginary part {imag:e}")]
    ComplexWigner { q: usize, p: usize, imag: f64 },

    #[error("grid violates the sign-redundancy rule at ({q},{p}) by {deviation:e}")]
    BrokenRedundancy { q: usize, p: usize, deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid line: {0}")]
    InvalidLine(String),

    #[error("line projector is inconsistent: {0}")]
    InconsistentProjector(String),

    #[error("map is not a permutation of 0..{0}")]
    NotPermutation(usize),

    #[error("linear map has determinant {det} mod {modulus}, expected 1")]
    NotSymplectic { det: i64, modulus: i64 },

    #[error(
        "undefined-interference: strip permutation has no classical action on interference terms"
    )]
    UndefinedInterference,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

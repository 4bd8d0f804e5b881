use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} out of range (must satisfy 2 <= d <= 65536)")]
    InvalidModulus(u64),
    #[error("{value} is not invertible mod {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: u64, modulus: u64 },
    #[error("duplicate abscissa x = {0}")]
    DuplicateAbscissa(u64),
    #[error("abscissa x = 0 is not allowed")]
    ZeroAbscissa,
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),
    #[error("participant index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: register has d = {register}, operator has d = {operator}")]
    DimensionMismatch { register: usize, operator: usize },
    #[error("register of {dim}^{count} amplitudes exceeds size cap {cap}")]
    SizeCapExceeded { dim: usize, count: usize, cap: usize },
    #[error("projection onto outcome {outcome} of qudit {qudit} has zero norm")]
    ZeroNormProjection { qudit: usize, outcome: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("reproduction check failed: {0}")]
    Reproduction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the dense cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("permutation group S_{n} exceeds the enumeration cap of n = {cap}")]
    GroupCap { n: usize, cap: usize },
    #[error("invalid Hilbert-space factorization: {0}")]
    Factorization(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a valid quantum state: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("container format error: {0}")]
    Container(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::DimensionCap { .. } | Error::GroupCap { .. })
    }
}

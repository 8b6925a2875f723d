use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not skew-symmetric (symmetric part norm {0:e})")]
    InvalidSkew(f64),
    #[error("normal vector is not unit length (norm {0})")]
    InvalidNormal(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("infinite modulus: {0}")]
    InfiniteModulus(&'static str),
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("spec error: {0}")]
    Spec(String),
    #[error("singular system: kernel dimension {kernel_dim}")]
    SingularSystem { kernel_dim: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid blade index: {0}")]
    InvalidBlade(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {0} (must be 1..={1})")]
    UnsupportedDimension(usize, usize),
    #[error("invalid mesh parameter: {0}")]
    InvalidMesh(String),
    #[error("probe {index} at t={t} left the admissible region: {reason}")]
    BadProbe { index: usize, t: f64, reason: String },
    #[error("invalid polynomial: {0}")]
    InvalidPoly(String),
    #[error("polynomial parse error: {0}")]
    PolyParse(String),
    #[error("gamma coefficient pole: Gamma({0}) in denominator")]
    GammaPole(f64),
    #[error("expansion error: {0}")]
    Expansion(String),
    #[error("kernel error: {0}")]
    Kernel(String),
    #[error("operator error: {0}")]
    Operator(String),
    #[error("seminorm error: {0}")]
    Seminorm(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("mesh file format error: {0}")]
    MeshFormat(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

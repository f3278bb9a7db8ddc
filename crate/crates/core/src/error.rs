use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: u128, cap: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("projected basis vector {index} has vanishing norm {norm:e}")]
    VanishingNorm { index: usize, norm: f64 },
    #[error("rows do not commute: {0} and {1}")]
    NonCommuting(usize, usize),
    #[error("certificate error: {0}")]
    Certificate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

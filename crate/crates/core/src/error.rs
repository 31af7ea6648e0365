use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuperError {
    /// The Kepler problem on `R^{D|2n}` needs `D > 2n + 1`.
    #[error("dimension condition D > 2n+1 violated (D = {d}, n = {n})")]
    DimensionCondition { d: usize, n: usize },
    /// The symmetric-tensor machinery needs `M - 2n > 1`.
    #[error("dimension condition M - 2n > 1 violated (M = {m}, n = {n})")]
    SymmetricCondition { m: usize, n: usize },
    #[error("operands live on different superspaces: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },
    #[error("invalid generator label {0}")]
    InvalidLabel(String),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, SuperError>;

//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by algebra and decomposition operations.
#[derive(Debug, Clone, Error)]
pub enum GaError {
    #[error("invalid signature ({0},{1},{2}): total dimension must be at most 12")]
    InvalidSignature(usize, usize, usize),

    #[error("signature mismatch: {0} vs {1}")]
    SignatureMismatch(String, String),

    #[error("grade {grade} exceeds dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: usize },

    #[error("basis index {0} is out of range for this signature")]
    IndexOutOfRange(usize),

    #[error("element is not invertible (symmetric norm {norm:.3e})")]
    NotInvertible { norm: f64 },

    #[error("expected a pure grade-{expected} element (off-grade norm {residual:.3e})")]
    NotPureGrade { expected: usize, residual: f64 },

    #[error("not a versor: {0}")]
    NotAVersor(String),

    #[error("not a blade: {0}")]
    NotABlade(String),

    #[error("operation unsupported for this signature: {0}")]
    UnsupportedSignature(String),

    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    #[error("no real principal square root")]
    NoPrincipalRoot,

    #[error("element lies outside the expected subalgebra (residual {residual:.3e})")]
    OutsideSubalgebra { residual: f64 },

    #[error("element is not in the spinor ideal (residual {residual:.3e})")]
    OutsideIdeal { residual: f64 },

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("matrix representation limited to dimension {max}, got {dim}")]
    OracleDimension { dim: usize, max: usize },
}

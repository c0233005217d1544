use thiserror::Error;

/// Errors raised by kernel, fiber and trace computations.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("dimension mismatch: expected rank {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernels live on different dynamical systems")]
    SystemMismatch,

    #[error("box radius {radius} too small for kernel support radius {support}")]
    BoxTooSmall { radius: i64, support: i64 },

    #[error("mode cutoff {cutoff} smaller than coefficient mode support {support}")]
    CutoffTooSmall { cutoff: i64, support: i64 },

    #[error("weight support radius {weight} too close to box boundary (need <= {max})")]
    WeightTooWide { weight: i64, max: i64 },

    #[error("matrix is not Hermitian within tolerance (max deviation {dev:.3e})")]
    NotHermitian { dev: f64 },

    #[error("kernel is not selfadjoint (max deviation {dev:.3e})")]
    NotSelfadjoint { dev: f64 },

    #[error("operation requires a finite configuration space, got {got}")]
    NotFinite { got: String },

    #[error("operation requires {required}, got {got}")]
    Unsupported { required: String, got: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

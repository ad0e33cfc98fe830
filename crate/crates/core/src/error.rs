use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the transforms, warps and I/O helpers.
#[derive(Debug, Error)]
pub enum WarpError {
    /// `log(kz + c)` evaluated where `|kz + c|` is numerically zero.
    #[error("singular input: |k*z + c| = {modulus:e} is at or below {threshold:e}")]
    SingularInput { modulus: f64, threshold: f64 },

    /// Mobius map evaluated at (or next to) its pole `cz + d = 0`.
    #[error("near singularity: |c*z + d| = {modulus:e} is at or below {threshold:e}")]
    NearSingularity { modulus: f64, threshold: f64 },

    /// Parameters that break a type invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Log parameters whose image of the normalized domain reaches the branch cut.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Transformed coordinates collapsed along one axis.
    #[error("degenerate range: transformed {axis} spans {span:e}, need at least {min:e}")]
    DegenerateRange { axis: &'static str, span: f64, min: f64 },

    #[error("channel mismatch: expected {expected} values, got {got}")]
    ChannelMismatch { expected: usize, got: usize },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported image format: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl WarpError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        WarpError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = WarpError> = std::result::Result<T, E>;

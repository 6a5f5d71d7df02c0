use thiserror::Error;

/// Errors raised by the latent, scheme, subspace, diagnostics and file modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight list is empty")]
    EmptyWeights,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} weights for {expected} latents, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("sum of squared weights {beta:e} is at or below the minimum {min:e}")]
    DegenerateWeights { beta: f64, min: f64 },

    #[error("latent has zero norm")]
    ZeroNorm,

    #[error("centroid has constant components; standard deviation is zero")]
    ConstantCentroid,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("latents are not linearly independent (column {column}, |R_kk| = {diag:e})")]
    RankDeficient { column: usize, diag: f64 },

    #[error("point is not in the subspace (relative residual {residual:e})")]
    NotInSubspace { residual: f64 },

    #[error("index {index} out of range for {len} subspace dimensions")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("bad magic bytes {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("unsupported dtype byte {0}")]
    BadDtype(u8),

    #[error("header field `{field}` must be zero, found {value}")]
    BadHeader { field: &'static str, value: u64 },

    #[error("payload length mismatch: header implies {expected} bytes, found {found}")]
    LengthMismatch { expected: u64, found: u64 },

    #[error("header dimensions overflow ({dim} x {count})")]
    DimensionOverflow { dim: u64, count: u64 },

    #[error("{path}: {message}")]
    SpecConfig { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Variant name, used as the error class in CLI messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyWeights => "EmptyWeights",
            Error::NonFinite { .. } => "NonFinite",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::DegenerateWeights { .. } => "DegenerateWeights",
            Error::ZeroNorm => "ZeroNorm",
            Error::ConstantCentroid => "ConstantCentroid",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::NotInSubspace { .. } => "NotInSubspace",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::BadMagic { .. } => "BadMagic",
            Error::UnsupportedVersion(_) => "UnsupportedVersion",
            Error::BadDtype(_) => "BadDtype",
            Error::BadHeader { .. } => "BadHeader",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::DimensionOverflow { .. } => "DimensionOverflow",
            Error::SpecConfig { .. } => "SpecConfig",
            Error::Io(_) => "Io",
        }
    }

    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

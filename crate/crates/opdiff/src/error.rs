use std::path::PathBuf;

use opdiff_core::Error as CoreError;

/// Failure of a CLI command, carrying the exit-code class.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad flags, unreadable or invalid configuration, inputs outside a domain.
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    /// A computation failed to converge or hit a numerical guard.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Verification ran and at least one check failed.
    #[error("{0}")]
    CheckFailed(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::CheckFailed(_) => 1,
            AppError::Usage(_) | AppError::Read { .. } | AppError::Write { .. } => 2,
            AppError::Numerical(_) => 3,
        }
    }

    /// Wraps a core error raised while working on degree `n`.
    pub fn at(n: usize, e: CoreError) -> Self {
        match Self::from(e) {
            AppError::Numerical(m) => AppError::Numerical(format!("n = {n}: {m}")),
            AppError::Usage(m) => AppError::Usage(format!("n = {n}: {m}")),
            other => other,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParams { .. }
            | CoreError::NonPositiveRho { .. }
            | CoreError::ConjugationBroken { .. }
            | CoreError::BranchCut { .. }
            | CoreError::OnInterval { .. }
            | CoreError::NotApplicable(_)
            | CoreError::PrimitiveMismatch { .. } => AppError::Usage(e.to_string()),
            _ => AppError::Numerical(e.to_string()),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

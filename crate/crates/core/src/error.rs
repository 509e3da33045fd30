use thiserror::Error;

/// Errors raised by the factorizations, iterations and drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not pseudosymmetric with respect to the signature (defect {defect:e})")]
    NotPseudosymmetric { defect: f64 },
    #[error("matrix is numerically singular (zero pivot at index {index})")]
    Singular { index: usize },
    #[error("iteration did not converge after {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("elliptic modulus {0} outside [0, 1)")]
    ModulusOutOfRange(f64),
    #[error("argument outside the admissible domain: {0}")]
    Domain(String),
    #[error("hyperbolic QR breakdown (pivot {pivot:e} below threshold {threshold:e})")]
    Breakdown { pivot: f64, threshold: f64 },
    #[error("matrix is not definite with respect to the signature")]
    NotDefinite,
    #[error("projector trace {trace} is not close to an integer")]
    IllConditionedProjector { trace: f64 },
    #[error("rank separation failed: {0}")]
    RankMismatch(String),
    #[error("spectral split is degenerate ({plus} positive of {n})")]
    SplitDegenerate { plus: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    /// Short machine-readable code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotPseudosymmetric { .. } => "NotPseudosymmetric",
            Error::Singular { .. } => "Singular",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ModulusOutOfRange(_) => "ModulusOutOfRange",
            Error::Domain(_) => "Domain",
            Error::Breakdown { .. } => "Breakdown",
            Error::NotDefinite => "NotDefinite",
            Error::IllConditionedProjector { .. } => "IllConditionedProjector",
            Error::RankMismatch(_) => "RankMismatch",
            Error::SplitDegenerate { .. } => "SplitDegenerate",
            Error::DimensionMismatch(_) => "DimensionMismatch",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::manifold::{ManifoldKind, MetricTag};

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the kernels, the manifold maps and the interpolation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigenvalue {re}{im:+}i lies on the branch cut of the principal logarithm")]
    SpectrumOnBranchCut { re: f64, im: f64 },

    #[error("matrix is not symmetric (residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is singular or too ill-conditioned (reciprocal condition {rcond:e})")]
    SingularInput { rcond: f64 },

    #[error("columns are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("{0} failed to converge")]
    DecompositionFailed(&'static str),

    #[error("tangent vectors live at different base points")]
    BaseMismatch,

    #[error("metric {metric:?} is not supported on {manifold:?}")]
    UnsupportedMetric { manifold: ManifoldKind, metric: MetricTag },

    #[error("point outside the injectivity domain: {0}")]
    OutOfInjectivityDomain(String),

    #[error("straight line left GL(n): endpoint is singular (reciprocal condition {rcond:e})")]
    LeftManifold { rcond: f64 },

    #[error("A^-1 B is not normal (residual {residual:e}); general left-invariant logarithm is unsupported")]
    NotNormal { residual: f64 },

    #[error("base point is singular")]
    SingularBase,

    #[error("vector is not tangent at the base point (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("vector is not horizontal at the base point (residual {residual:e})")]
    NotHorizontal { residual: f64 },

    #[error("relative rotation has eigenvalue -1 (angle {angle}); logarithm is not unique")]
    AntipodalSpectrum { angle: f64 },

    #[error("points lie in different connected components of O(n)")]
    ComponentMismatch,

    #[error("no convergence after {iterations} iterations (last residual {:e})", .history.last().copied().unwrap_or(f64::NAN))]
    NoConvergence { iterations: usize, history: Vec<f64> },

    #[error("U^T U~ is rank deficient (smallest singular value {smallest_singular_value:e}); use the modified Grassmann logarithm")]
    RankDeficientOverlap { smallest_singular_value: f64 },

    #[error("logarithm failed for sample {index}: {source}")]
    LogDomainFailure {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("weight scheme unsupported: {0}")]
    WeightSchemeUnsupported(String),

    #[error("parameter {mu} outside the sampled range [{lo}, {hi}]")]
    OutOfRange { mu: f64, lo: f64, hi: f64 },

    #[error("singular values {i} and {j} are not separated (relative gap {gap:e})")]
    DegenerateSpectrum { i: usize, j: usize, gap: f64 },

    #[error("singular value {index} is zero")]
    SingularValueZero { index: usize },

    #[error("invalid sample set: {0}")]
    InvalidSamples(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn shape(expected: impl Into<String>, rows: usize, cols: usize) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            actual: format!("{rows}x{cols}"),
        }
    }

    pub(crate) fn log_failure(index: usize, source: Error) -> Self {
        Error::LogDomainFailure {
            index,
            source: Box::new(source),
        }
    }
}

use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular input: {0}")]
    Singular(String),

    /// The defining function has a vanishing gradient, so no unit normal exists.
    #[error("degenerate point: gradient magnitude {gradient_norm:e} is below threshold")]
    DegeneratePoint { gradient_norm: f64 },

    /// Coordinate tangent vectors of a chart are linearly dependent.
    #[error("degenerate chart: tangent wedge magnitude {wedge_norm:e} is below threshold")]
    DegenerateChart { wedge_norm: f64 },

    #[error("projection onto manifold failed after {iterations} iterations (residual {residual:e})")]
    ProjectionFailure { residual: f64, iterations: usize },

    #[error("shape tensor magnitude {magnitude:e} is below the degeneracy threshold")]
    DegenerateShape { magnitude: f64, tau: Option<f64> },

    #[error("span condition violated at tau = {tau}: least-squares residual {residual:e}")]
    SpanCondition { tau: f64, residual: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    /// A manifold description is malformed; `field` names the offending entry.
    #[error("invalid manifold field `{field}`: {message}")]
    Spec { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable identifier, used in structured error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Singular(_) => "singular",
            Error::DegeneratePoint { .. } => "degenerate_point",
            Error::DegenerateChart { .. } => "degenerate_chart",
            Error::ProjectionFailure { .. } => "projection_failure",
            Error::DegenerateShape { .. } => "degenerate_shape",
            Error::SpanCondition { .. } => "span_condition",
            Error::Parse(_) => "parse_error",
            Error::Spec { .. } => "invalid_manifold",
            Error::Io(_) => "io_error",
            Error::Csv(_) => "csv_error",
        }
    }

    /// Curve parameter at which an integration failed, when known.
    pub fn tau(&self) -> Option<f64> {
        match self {
            Error::DegenerateShape { tau, .. } => *tau,
            Error::SpanCondition { tau, .. } => Some(*tau),
            _ => None,
        }
    }

    /// Whether this is a numerical failure (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular(_)
                | Error::DegeneratePoint { .. }
                | Error::DegenerateChart { .. }
                | Error::ProjectionFailure { .. }
                | Error::DegenerateShape { .. }
                | Error::SpanCondition { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

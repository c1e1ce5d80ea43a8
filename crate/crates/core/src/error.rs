use std::fmt;

use thiserror::Error;

/// A single reason an operator failed validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Smallest eigenvalue fell below the negativity tolerance. `element` is
    /// the POVM outcome index when the operator belongs to a measurement.
    NegativeEigenvalue { element: Option<usize>, value: f64 },
    /// Trace is not within tolerance of one.
    TraceDeviation { trace: f64 },
    /// `‖Σ_y F_y − I‖_max` exceeded the tolerance.
    Completeness { residual: f64 },
    /// Largest entry of `A − A†`.
    NonHermitian { element: Option<usize>, deviation: f64 },
    /// Operators in one family disagree on dimension.
    DimensionMismatch { element: usize, expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEigenvalue { element: Some(i), value } => {
                write!(f, "element {i} has negative eigenvalue {value:e}")
            }
            Violation::NegativeEigenvalue { element: None, value } => {
                write!(f, "negative eigenvalue {value:e}")
            }
            Violation::TraceDeviation { trace } => write!(f, "trace is {trace}, expected 1"),
            Violation::Completeness { residual } => {
                write!(f, "elements sum to identity only within {residual:e}")
            }
            Violation::NonHermitian { element, deviation } => match element {
                Some(i) => write!(f, "element {i} is not Hermitian (deviation {deviation:e})"),
                None => write!(f, "operator is not Hermitian (deviation {deviation:e})"),
            },
            Violation::DimensionMismatch { element, expected, found } => {
                write!(f, "element {element} has dim {found}, expected {expected}")
            }
        }
    }
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} failed validation: {}", join(.violations))]
    Invalid { what: &'static str, violations: Vec<Violation> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate ensemble: discrimination operator vanished")]
    DegenerateEnsemble,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that describe bad input data rather than a failure of
    /// the computation itself.
    pub fn is_input_violation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Invalid { .. } | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

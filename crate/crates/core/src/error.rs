use thiserror::Error;

/// Errors produced by the model, solvers and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// The beam-constraint system is singular, i.e. the axial load sits at
    /// (or beyond) the buckling-critical compressive value.
    #[error("non-physical beam load on joint {joint}: axial load {axial_load:.4} N makes the deflection system singular")]
    NonPhysicalLoad { joint: usize, axial_load: f64 },

    #[error("arc length {s_c:.4} mm is outside the backbone [0, {length:.4}] mm")]
    OutOfRange { s_c: f64, length: f64 },

    #[error("equilibrium did not converge after {iterations} iterations (residual {residual:.3e} rad)")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("no tension in [0, {max_tension}] N reaches set length for cable {}", .cable + 1)]
    InfeasibleDisplacement { cable: usize, max_tension: f64 },

    #[error("contact estimation failed: {0}")]
    EstimationFailed(String),

    #[error("recalibration aborted: decoupled force drifted by {drift:.4} N (tolerance {tolerance:.4} N)")]
    RecalibrationAborted { drift: f64, tolerance: f64 },

    /// Malformed input file; `line` and `column` are 1-based, 0 when unknown.
    #[error("{}", parse_location(*line, *column, message))]
    Parse { line: usize, column: usize, message: String },

    #[error("shooting oracle failed: {0}")]
    OracleFailure(String),

    #[error("sample {index}: {source}")]
    AtSample {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

fn parse_location(line: usize, column: usize, message: &str) -> String {
    match (line, column) {
        (0, _) => format!("parse error: {message}"),
        (l, 0) => format!("parse error at line {l}: {message}"),
        (l, c) => format!("parse error at line {l}, column {c}: {message}"),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Strips any sample-index wrapper.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSample { source, .. } => source.root(),
            e => e,
        }
    }
}

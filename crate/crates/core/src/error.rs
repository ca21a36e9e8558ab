use thiserror::Error;

use crate::epsnet::NetReport;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("bodies do not intersect in a set of positive area")]
    EmptyIntersection,
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("strip half-width {width} does not exceed net radius {radius}")]
    MarginTooSmall { width: f64, radius: f64 },
    #[error("family volume {volume} is below the required {required}")]
    InsufficientVolume { volume: f64, required: f64 },
    #[error("homothet family exhausted: {0}")]
    FamilyExhausted(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("greedy placement failed: {0}")]
    PlacementFailed(String),
    #[error("no smooth frame found: {0}")]
    FrameNotFound(String),
    #[error("no usable ratio: {0}")]
    RatioUnavailable(String),
    #[error("ground element {0} lies in no edge")]
    UncoverableElement(usize),
    #[error("saturation budget exceeded after {0} points")]
    SaturationBudget(usize),
    #[error("rounding failed after {attempts} attempts")]
    RoundingFailed { attempts: usize },
    #[error("all {attempts} attempts failed")]
    RetriesExhausted {
        attempts: usize,
        best: Option<Box<NetReport>>,
    },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("infeasible measure: {0}")]
    InfeasibleMeasure(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

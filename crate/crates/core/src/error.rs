use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("degree {degree} exceeds the configured bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("missing orientation: {0}")]
    MissingOrientation(String),
    #[error("missing labels: {0}")]
    MissingLabels(String),
    #[error("exponential argument has a nonzero degree-0 term")]
    NonzeroConstantTerm,
    #[error("vertex set is too small for the requested ambient space")]
    EmptyV,
    #[error("unknown vertex {0}")]
    UnknownVertex(i64),
    #[error("face could not be classified: {0}")]
    Unclassifiable(String),
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("cancellation gap: {0}")]
    CancellationGap(String),
    #[error("invalid tree: {}", .0.join("; "))]
    InvalidTree(Vec<String>),
    #[error("degenerate scale: {0}")]
    DegenerateScale(String),
    #[error("chart point outside the admissible neighborhood: {0}")]
    OutsideNeighborhood(String),
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),
    #[error("quaternion is not a unit (norm {0})")]
    NonUnit(f64),
    #[error("curves are too close (distance {0:e})")]
    CurvesTooClose(f64),
    #[error("curve is not closed (gap {0:e})")]
    NotClosed(f64),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("xi series has a component in even degree {0}")]
    BadXiParity(usize),
}

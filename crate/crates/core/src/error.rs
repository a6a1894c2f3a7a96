use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("denominator must be written without a sign in `{0}`")]
    SignedDenominator(String),
    #[error("zero denominator")]
    DivisionByZeroDenominator,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("point is not feasible")]
    InfeasiblePoint,
    #[error("target is unreachable in the vertex-edge graph")]
    Unreachable,
    #[error("the selected rows define an empty face")]
    EmptyFace,
    #[error("the selected rows define a single point, not a polyhedron of positive dimension")]
    PointFace,
    #[error("row {0} is not a facet index of this polyhedron")]
    InvalidFacet(usize),
    #[error("polyhedron has {0} rows; at most 64 are supported")]
    TooManyRows(usize),
    #[error("polyhedron must have dimension at least 1")]
    ZeroDimension,
    #[error("slope must be positive")]
    NonPositiveSlope,
    #[error("polyhedron is invalid: {0}")]
    Invalid(String),
    #[error("perturbation failed to keep the polyhedron valid after {0} attempts")]
    PerturbationFailed(usize),
    #[error("search budget exhausted after {0} attempts")]
    Exhausted(usize),
    #[error("vertices share facet(s) {0:?}")]
    SharedFacet(Vec<usize>),
    #[error("polyhedron is already bounded")]
    AlreadyBounded,
    #[error("point already has full active rank")]
    RankComplete,
    #[error("not a spindle: {0}")]
    NotASpindle(String),
    #[error("walk does not transfer back to the original polyhedron: {0}")]
    TransferFailed(String),
    #[error("wedge walk is not transferable at step {step}: {reason}")]
    NotTransferable { step: usize, reason: String },
    #[error("verification failed at stage `{stage}`: {detail}")]
    VerificationFailed { stage: String, detail: String },
    #[error("point is not a vertex")]
    NotAVertex,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

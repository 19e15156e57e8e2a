//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spacing must satisfy 0 < h < epsilon (h = {h}, epsilon = {epsilon})")]
    InvalidSpacing { h: f64, epsilon: f64 },
    #[error("collar width {got} is narrower than the required jump width {required}")]
    CollarTooNarrow { required: f64, got: f64 },
    #[error("shape admits no interior lattice point at spacing {h}")]
    EmptyInterior { h: f64 },
    #[error("field length {got} does not match domain point count {expected}")]
    FieldLength { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("interior point {index} cannot reach the boundary through epsilon-ball chains")]
    UnreachableInterior { index: usize },
    #[error("annular partitions require a disk domain")]
    NotADisk,
    #[error(
        "outer radius {outer} is not admissible (outer^2 must equal 2K*epsilon^2); \
         nearest admissible domain radius is {suggested}"
    )]
    InadmissibleRadius { outer: f64, suggested: f64 },
    #[error("point-cloud domains must supply boundary distances at construction")]
    MissingDistances,
    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },
    #[error("operator requires a two-dimensional domain")]
    RequiresPlane,
    #[error("boundary shift {shift} leaves min boundary data at {min_after} <= 0")]
    ShiftTooSmall { shift: f64, min_after: f64 },
    #[error("seed is not a subsolution: slack {slack:.3e} at point {index}")]
    NotASubsolution { slack: f64, index: usize },
    #[error("seed is not a supersolution: slack {slack:.3e} at point {index}")]
    NotASupersolution { slack: f64, index: usize },
    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("monotone iteration dropped by {drop:.3e} at iteration {iteration}, point {index}")]
    MonotoneViolation { iteration: usize, index: usize, drop: f64 },
    #[error("from-above and from-below limits disagree by {gap:.3e}: possible non-uniqueness")]
    NonUnique { gap: f64 },
    #[error("domain has {points} points, above the brute-force limit {limit}")]
    TooManyPoints { points: usize, limit: usize },
    #[error("control-grid exponents violate {constraint}")]
    ExponentConstraint { constraint: String },
    #[error("barrier amplitude search did not reach positive slack after {doublings} doublings")]
    AmplitudeSearch { doublings: u32 },
    #[error("unsupported dimension {dim}")]
    UnsupportedDimension { dim: usize },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

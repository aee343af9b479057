use thiserror::Error;

/// Errors raised while constructing or using quantizer components.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variance must be positive and finite, got {0}")]
    InvalidVariance(f64),

    #[error("invalid interval: lower bound {a} exceeds upper bound {b}")]
    InvalidInterval { a: f64, b: f64 },

    #[error("lower integration bound must be nonnegative, got {0}")]
    NegativeBound(f64),

    #[error("tail threshold must be positive, got {0}")]
    NonPositiveTail(f64),

    #[error("support threshold must be positive and finite, got {0}")]
    InvalidSupport(f64),

    #[error("|{value}| lies outside the support region [-{x_max}, {x_max}]")]
    OutsideSupport { value: f64, x_max: f64 },

    #[error("area {0} is not reachable by the cube-root density integral")]
    UnreachableArea(f64),

    #[error("spline needs at least 2 knots, got {0}")]
    TooFewKnots(usize),

    #[error("knots and values differ in length: {knots} vs {values}")]
    LengthMismatch { knots: usize, values: usize },

    #[error("knots must be strictly increasing (violated at index {0})")]
    KnotsNotIncreasing(usize),

    #[error("spline must be strictly increasing to invert")]
    NotMonotone,

    #[error("value {y} outside spline range [{lo}, {hi}]")]
    OutsideRange { y: f64, lo: f64, hi: f64 },

    #[error("evaluation grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),

    #[error("number of levels must be an even count >= 4, got {0}")]
    InvalidLevelCount(usize),

    #[error("N = {n_levels} must be divisible by twice the per-quadrant segment count L = {segments}")]
    NotDivisible { n_levels: usize, segments: usize },

    #[error("configuration N = {n_levels}, L = {segments} leaves the last segment without cells")]
    EmptyLastSegment { n_levels: usize, segments: usize },

    #[error("last segment needs at least one cell, got {0}")]
    InvalidCellCount(usize),

    #[error("support threshold {x_max} must exceed the frozen segment threshold {x_frozen}")]
    SupportTooSmall { x_max: f64, x_frozen: f64 },

    #[error("sample must be finite")]
    NonFiniteSample,

    #[error("index {index} out of range for a {n_levels}-level codebook")]
    IndexOutOfRange { index: usize, n_levels: usize },

    #[error("cell ({segment}, {cell}) does not exist in this design")]
    InvalidCell { segment: usize, cell: usize },

    #[error("worker count must be at least 1")]
    NoWorkers,

    #[error("Monte Carlo run needs at least one sample")]
    NoSamples,

    #[error("sweep grid is empty or malformed: lo = {lo}, hi = {hi}, step = {step}")]
    InvalidGrid { lo: f64, hi: f64, step: f64 },

    #[error("design file: {0}")]
    DesignFile(String),
}

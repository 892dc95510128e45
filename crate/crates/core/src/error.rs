use thiserror::Error;

/// Errors raised by estimation, forecasting, simulation and metric routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum FcarError {
    #[error("series is empty")]
    EmptySeries,

    #[error("non-finite value at index {0}")]
    NonFiniteValue(usize),

    #[error("timestamps must be strictly increasing and match the number of values")]
    NonMonotoneTimestamps,

    #[error("series too short: need more than {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("degenerate interval [{a}, {b}]: lower end must be below upper end")]
    DegenerateInterval { a: f64, b: f64 },

    #[error("delay value at row {0} lies outside the knot range")]
    OutOfSupport(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lag index {gamma} outside 1..={p}")]
    GammaOutOfRange { gamma: usize, p: usize },

    #[error("delay variable has zero spread")]
    DegenerateDelay,

    #[error("no observation within 8 bandwidths of u = {0}")]
    NoSupport(f64),

    #[error("simulation diverged at step {step} (seed {seed})")]
    NonFiniteState { seed: u64, step: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("samples have zero spread")]
    DegenerateSamples,

    #[error("no default parameters for order p = {0} (available: 4, 10)")]
    UnsupportedOrder(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("forecast step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<FcarError>,
    },

    #[error("replication {rep} (seed {seed}) failed: {source}")]
    Replication {
        rep: usize,
        seed: u64,
        #[source]
        source: Box<FcarError>,
    },
}

pub type Result<T, E = FcarError> = std::result::Result<T, E>;

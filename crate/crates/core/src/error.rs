use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("weight {index} is not finite and nonnegative: {value}")]
    InvalidWeight { index: usize, value: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coordinate of point {0} is not finite")]
    NonFiniteCoordinate(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance has no positions")]
    MissingPositions,
    #[error("layout has {available} traps but {required} are required")]
    LayoutTooSmall { required: usize, available: usize },
    #[error("cannot place replacement edge: {0}")]
    RewireInfeasible(String),
    #[error("graph is disconnected ({components} components); closeness is undefined")]
    Disconnected { components: usize },
    #[error("instance too large: {n} vertices exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("decomposition width {width} exceeds the supported maximum {max}")]
    WidthTooLarge { width: usize, max: usize },
    #[error("state norm drifted by {drift:e}; use a smaller time step")]
    NormDrift { drift: f64 },
    #[error("readout channel is singular (p + q = {0} >= 1)")]
    SingularChannel(f64),
    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },
    #[error("undefined normalization: {0}")]
    Undefined(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

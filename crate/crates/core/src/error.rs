use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid weight {weight} on edge {u} -- {v}")]
    InvalidWeight { u: String, v: String, weight: f64 },

    #[error("interior set is empty")]
    EmptyInterior,

    #[error("vertex `{0}` has zero measure")]
    ZeroMeasure(String),

    #[error("vertex `{0}` is not in the closure of the domain")]
    OutsideClosure(String),

    #[error("vertex `{0}` is not in the window")]
    NotInWindow(String),

    #[error("vertex `{0}` is not an interior vertex of the window")]
    NotInterior(String),

    #[error("vertex `{0}` is not a boundary vertex of the window")]
    NotBoundary(String),

    #[error("vertex set is empty")]
    EmptySet,

    #[error("window has no vertices on the domain boundary")]
    NoBoundary,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("mass entry {index} is not positive ({value})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})")]
    CgStalled { iterations: usize, residual: f64 },

    #[error("exact enumeration over {size} vertices exceeds the cap of {cap}; use the parametric cut")]
    EnumerationCap { size: usize, cap: usize },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parametric cut did not converge; optimum lies in [{lower}, {upper}]")]
    CutNoConvergence { lower: f64, upper: f64 },

    #[error("negative value {value} at vertex `{vertex}`")]
    NegativeValue { vertex: String, value: f64 },

    #[error("{quantity} increased from {previous:e} to {current:e} at radius {radius}")]
    NotMonotone {
        quantity: String,
        radius: usize,
        previous: f64,
        current: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a size or vertex budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_) | Error::EnumerationCap { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

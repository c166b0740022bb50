use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised while building or evaluating fields, bi-forms and potentials.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point {coords:?} lies outside the chart domain of `{chart}`")]
    Domain { chart: String, coords: Vec<f64> },

    #[error("point pair ({left:?}, {right:?}) lies outside the diagonal neighborhood")]
    OutsideNeighborhood { left: Vec<f64>, right: Vec<f64> },

    #[error("singular or ill-conditioned matrix at {coords:?} (condition estimate {condition:e})")]
    Singular { coords: Vec<f64>, condition: f64 },

    #[error("coframe is not a frame at {coords:?} (condition estimate {condition:e})")]
    FrameSingular { coords: Vec<f64>, condition: f64 },

    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("bi-form degree ({p}, {q}) exceeds the supported maximum of 2 per side")]
    DegreeOverflow { p: usize, q: usize },

    #[error("derivative order {requested} exceeds the jet order limit {limit}")]
    OrderOverflow { requested: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a contrast bi-form at {coords:?}: {reason}")]
    NotAContrast { coords: Vec<f64>, reason: String },

    #[error("induced metric is not symmetric at {coords:?} (asymmetry {asymmetry:e})")]
    Asymmetric { coords: Vec<f64>, asymmetry: f64 },

    #[error("unknown operator monotone function `{0}` (expected one of BKM, SLD, WY)")]
    UnknownMonotoneFunction(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = core::result::Result<T, Error>;

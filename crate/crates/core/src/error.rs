use thiserror::Error;

/// Errors raised by the library. Verifier outcomes (path validation,
/// certificate checks) are reported as values, not through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("basepoint {basepoint} out of range for {len} points")]
    BasepointOutOfRange { basepoint: usize, len: usize },

    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("asymmetric distance at ({i},{j}): {dij} vs {dji}")]
    Asymmetric { i: usize, j: usize, dij: f64, dji: f64 },

    #[error("negative distance {value} at ({i},{j})")]
    NegativeDistance { i: usize, j: usize, value: f64 },

    #[error("nonzero diagonal entry {value} at {i}")]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("triangle inequality violated at ({i},{k}) via {j}: {dik} > {dij} + {djk}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        dik: f64,
        dij: f64,
        djk: f64,
    },

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("scale mismatch: {0} vs {1}")]
    ScaleMismatch(f64, f64),

    #[error("endpoint mismatch: path ends at {end}, next starts at {start}")]
    EndpointMismatch { end: usize, start: usize },

    #[error("point id {id} out of range for {len} points")]
    PointOutOfRange { id: usize, len: usize },

    #[error("invalid lazification schedule: {0}")]
    InvalidSchedule(String),

    #[error("path is not a valid theta-path: step {index} has length {distance} > {theta}")]
    NotThetaPath {
        index: usize,
        distance: f64,
        theta: f64,
    },

    #[error("path is not closed")]
    OpenPath,

    #[error("path is not based at {expected} (starts at {found})")]
    WrongBasepoint { expected: usize, found: usize },

    #[error("point {0} is outside the basepoint component")]
    ForeignComponent(usize),

    #[error("no cloud point within snapping radius {radius} of sample {sample}")]
    SnapFailure { sample: usize, radius: f64 },

    #[error("product of sample counts {count} exceeds cap {cap}")]
    TooManyPoints { count: usize, cap: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range {min}..={max}")]
    Index { index: usize, min: usize, max: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },

    #[error("matrix entry ({i}, {j}) = {value} is not positive")]
    NonPositiveEntry { i: usize, j: usize, value: f64 },

    #[error("matrix order {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("spectral multiplier {value} at mode ({ix}, {iy}) is not positive")]
    SingularMultiplier { ix: usize, iy: usize, value: f64 },

    #[error("field has nonzero mean {0}; the inverse Laplacian is undefined")]
    NonZeroMean(f64),

    #[error("model {model} is not supported by the {scheme} scheme")]
    UnsupportedModel { model: String, scheme: String },

    #[error("stabilization S = {s} is below the threshold {min} required for {model}")]
    Stabilization { model: String, s: f64, min: f64 },

    #[error("SAV shift is not admissible: E1 + C0 = {0}")]
    SavShift(f64),

    #[error("rank-one denominator {0} is not positive")]
    RankOneDenominator(f64),

    #[error("mesh has {available} steps, cannot advance past step {requested}")]
    MeshExhausted { requested: usize, available: usize },

    #[error("insufficient points: need at least {need}, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

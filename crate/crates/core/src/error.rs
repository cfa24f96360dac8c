use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("sphere constraint violated: max ||u|-1| = {0:e}")]
    NotOnSphere(f64),

    #[error("mean {mean:e} is not zero (threshold {threshold:e}); project it out first")]
    MeanNotZero { mean: f64, threshold: f64 },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("operation supports d = 1 only, got d = {0}")]
    UnsupportedDimension(usize),

    #[error("support diameter {diameter} exceeds {limit}")]
    SupportTooWide { diameter: f64, limit: f64 },

    #[error("time step produced a non-finite field at t = {0}")]
    StepUnstable(f64),

    #[error("perturbed data has zero difference energy at t = 0")]
    DegenerateEnergy,

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed field dump: {0}")]
    Dump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

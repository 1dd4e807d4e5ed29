use thiserror::Error;

use crate::geometry::Domain;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("point {x} lies outside the support [{lo}, {hi}]")]
    OutsideSupport { x: f64, lo: f64, hi: f64 },
    #[error("level {index} out of range for a family with {levels} levels")]
    LevelOutOfRange { index: usize, levels: usize },
    #[error("energy {value} lies below the lowest ring cut {bottom}")]
    BelowLadder { value: f64, bottom: f64 },
    #[error("restriction carries zero mass")]
    ZeroMass,
    #[error("density vanishes at {0}")]
    ZeroDensity(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("kernel does not expose an exact one-step law")]
    NoExactLaw,
    #[error("curvature is undefined for coincident points")]
    CoincidentPoints,
    #[error("transition matrix is not reversible (defect {0:e})")]
    NonReversible(f64),
    #[error("test function has zero variance under the kernel")]
    DegenerateTestFunction,
    #[error("not enough samples: {0}")]
    TooFewSamples(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }

    /// Errors caused by user input rather than by a failed computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::OutOfRange(_) | Error::Toml(_) | Error::DomainMismatch(..)
        )
    }
}

use thiserror::Error;

/// Errors raised anywhere in the expansion laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular chart: denominator {denominator:.3e} at eta = {eta}")]
    SingularChart { denominator: f64, eta: f64 },

    #[error("iteration limit {iterations} reached (last residual {:.3e})", residuals.last().copied().unwrap_or(f64::NAN))]
    IterationLimit { iterations: usize, residuals: Vec<f64> },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn at_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

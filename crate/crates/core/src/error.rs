use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge (partial value {partial}, error estimate {estimate:e})")]
    Quadrature { partial: f64, estimate: f64 },

    #[error("solver blow-up at t = {t}")]
    BlowUp { t: f64 },

    #[error("alpha condition violated: 1 - eps^2 tau nu^2 = {margin}")]
    AlphaViolated { margin: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

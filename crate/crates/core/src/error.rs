use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied an argument outside the operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A mathematical contract (unitarity, completeness, hermiticity) was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A least-squares fit could not be carried out.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Rescaling would amplify noise beyond the supported bound.
    #[error(
        "depth {n_steps} cannot be mitigated: retention factor {retention:e} is below {floor:e}"
    )]
    Unmitigatable {
        n_steps: usize,
        retention: f64,
        floor: f64,
    },

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("runs are not comparable: {0}")]
    Comparison(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Contract(_) => "contract",
            Error::Fit(_) => "fit",
            Error::Unmitigatable { .. } => "unmitigatable",
            Error::Config { .. } => "config",
            Error::Comparison(_) => "comparison",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// The config field at fault, for config errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Config { field, .. } => Some(field),
            _ => None,
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

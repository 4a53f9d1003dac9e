use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field failed validation.
    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: &'static str, reason: String },

    /// An operation was called outside its precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no sessions to summarize")]
    EmptyTrace,

    #[error("config file: {0}")]
    ConfigFile(#[from] toml::de::Error),

    #[error("manifest serialization: {0}")]
    Manifest(#[from] toml::ser::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}

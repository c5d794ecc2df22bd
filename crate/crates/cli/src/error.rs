use optomech_core::Error as ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("at {point}: {source}")]
    AtPoint {
        point: String,
        #[source]
        source: ModelError,
    },

    #[error("{0}")]
    Model(#[from] ModelError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// Process exit status: 2 for failed validation, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            _ => 1,
        }
    }
}

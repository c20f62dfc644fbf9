use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file, schema violation or malformed graph file.
    #[error("{0}")]
    Config(String),
    /// I/O or generation failure after the inputs were accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

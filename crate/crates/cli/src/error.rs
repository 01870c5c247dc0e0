use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(kslab::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration, 3 for numerical, 4 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<kslab::Error> for CliError {
    fn from(e: kslab::Error) -> Self {
        match e {
            kslab::Error::Io(io) => CliError::Io(io),
            kslab::Error::Parse(p) => CliError::Config(format!("expression: {p}")),
            other => CliError::Numerical(other),
        }
    }
}

impl From<kslab::expr::ParseError> for CliError {
    fn from(e: kslab::expr::ParseError) -> Self {
        CliError::Config(format!("expression: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

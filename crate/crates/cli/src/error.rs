use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(#[from] NumericError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0} oracle suite(s) failed")]
    OracleFailed(usize),
}

#[derive(Debug, Error)]
#[error(transparent)]
pub struct NumericError(pub nilskew::Error);

impl From<nilskew::Error> for CliError {
    fn from(e: nilskew::Error) -> Self {
        match e {
            nilskew::Error::Config(m) | nilskew::Error::Parse(m) => CliError::Config(m),
            e => CliError::Numeric(NumericError(e)),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

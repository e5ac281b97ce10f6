use activation_robustness::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    /// Unreadable, malformed or incompatible input documents.
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("failed acceptance criteria: {0:?}")]
    Failed(Vec<u32>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Failed(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateSpread { .. } => CliError::Numerical(format!("degenerate spread: {e}")),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

use std::fmt;
use std::process::ExitCode;

use choreo_core::scenario::ScenarioError;

/// Failure of a command, tagged with the exit status it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input file.
    Input(String),
    /// Input parsed but violates a model constraint.
    Invalid(String),
    /// No couplings realize the requested ratios.
    Design(String),
    /// Failure while running an otherwise valid command.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Runtime(_) => 1,
            CliError::Input(_) => 2,
            CliError::Invalid(_) => 3,
            CliError::Design(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Invalid(m) | CliError::Design(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Invalid(_) => CliError::Invalid(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub fn write_failed(path: &str, e: impl fmt::Display) -> CliError {
    CliError::Runtime(format!("cannot write {path}: {e}"))
}

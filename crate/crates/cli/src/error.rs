use std::fmt;

/// A failed command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input files (exit 2).
    Usage(String),
    /// The request has no solution, e.g. a task nobody can serve (exit 3).
    Infeasible(String),
    /// Arguments outside the domain of a formula (exit 4).
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Domain(_) => 4,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<retainer_core::Error> for CliError {
    fn from(e: retainer_core::Error) -> Self {
        use retainer_core::Error as E;
        match e {
            E::UncoveredTask { .. } | E::Infeasible(_) => CliError::Infeasible(e.to_string()),
            E::InvalidConfig(_) => CliError::Usage(e.to_string()),
            E::Domain(_) | E::Network(_) => CliError::Domain(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("cannot parse input: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

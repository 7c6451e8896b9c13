//! Command errors and their exit codes.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Malformed scenario, data file or flag. Exit code 2.
    Config(String),
    /// Numerical failure or oracle disagreement. Exit code 3.
    Numerical(String),
    /// Fit did not converge or had too few points. Exit code 4.
    Fit(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Fit(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Prefixes the message, keeping the category.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{ctx}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{ctx}: {m}")),
            CliError::Fit(m) => CliError::Fit(format!("{ctx}: {m}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Fit(m) => write!(f, "fit failure: {m}"),
        }
    }
}

impl From<spinwave::Error> for CliError {
    fn from(e: spinwave::Error) -> Self {
        use spinwave::Error as E;
        match e {
            E::InvalidInput(_) => CliError::Config(e.to_string()),
            E::Fit(_) => CliError::Fit(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

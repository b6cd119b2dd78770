use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or violated precondition (exit 1).
    Config(String),
    /// A numerical scheme did not converge (exit 2).
    Numerical(String),
    /// Writing output failed (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Numerical(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<lgpoly_core::Error> for CliError {
    fn from(e: lgpoly_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

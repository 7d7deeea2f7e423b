//! Failure kinds and the exit-code contract.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Numerical,
    Verification,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Numerical | ErrorKind::Io => 3,
            ErrorKind::Verification => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliError {
    #[serde(rename = "error")]
    pub message: String,
    pub kind: ErrorKind,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl fmt::Display) -> Self {
        Self {
            message: message.to_string(),
            kind,
        }
    }

    pub fn config(message: impl fmt::Display) -> Self {
        Self::new(ErrorKind::Config, message)
    }

    pub fn numerical(message: impl fmt::Display) -> Self {
        Self::new(ErrorKind::Numerical, message)
    }

    pub fn verification(message: impl fmt::Display) -> Self {
        Self::new(ErrorKind::Verification, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// One-line JSON for standard error.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Precondition failures are configuration errors; anything else raised
/// while computing is numerical.
impl From<blochldp::Error> for CliError {
    fn from(e: blochldp::Error) -> Self {
        use blochldp::Error::*;
        match e {
            DegenerateStart { .. } | InsufficientGrid { .. } | InvalidGrid(_)
            | InvalidGenerator(_) | InvalidParams(_) | NotADensityMatrix(_)
            | NotAProjection(_) | NegativeTime(_) => CliError::config(e),
            _ => CliError::numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(ErrorKind::Io, e)
    }
}

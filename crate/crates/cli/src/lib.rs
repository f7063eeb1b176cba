//! Library half of the `klab` binary: config schema, family registry,
//! report model, and the drivers behind each subcommand. Kept as a lib so
//! the integration tests can parse emitted reports back into typed form.

pub mod config;
pub mod experiment;
pub mod families;
pub mod report;

use std::fmt;

/// Failure classes, each with a fixed process exit code so scripts can
/// distinguish "your config is wrong" from "the numbers came out wrong"
/// from "the disk said no".
#[derive(Debug)]
pub enum CliError {
    /// Bad config, unknown family, invalid pairing — exit 2.
    Validation(String),
    /// Evaluation failures or verified claims that did not hold — exit 3.
    Numerical(String),
    /// Filesystem trouble — exit 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation: {m}"),
            CliError::Numerical(m) => write!(f, "numerical: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<korovkin_lab::error::Error> for CliError {
    fn from(e: korovkin_lab::error::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

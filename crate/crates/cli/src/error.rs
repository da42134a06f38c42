//! Process-level error classification.
//!
//! Everything that can go wrong falls into one of two buckets, each mapped
//! to a fixed exit code: unusable inputs (exit 1) and failures while
//! producing outputs (exit 2). Success is exit 0. Keeping the mapping this
//! coarse makes it scriptable — a wrapper can retry runtime failures but
//! knows a validation failure will never fix itself.

use std::fmt;

/// A command failure carrying its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// The inputs are unusable: a file is missing, its JSON is malformed,
    /// or the specification inside fails validation.
    Invalid(String),
    /// The inputs were fine but the run could not complete, e.g. an output
    /// directory or file could not be written.
    Runtime(String),
}

impl CliError {
    /// The exit code this failure maps to: 1 for invalid inputs, 2 for
    /// runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

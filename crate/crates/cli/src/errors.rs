//! Exit-code-bearing error type.
//!
//! Code 2 is configuration/input trouble (missing files, bad shapes, parse
//! errors); code 1 is reserved for validation-suite failures.

use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

macro_rules! from_config_error {
    ($($ty:ty),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::config(e.to_string())
            }
        })*
    };
}

from_config_error!(
    xdig::GraphError,
    xdig::TransformError,
    xdig::AttributionError,
    xdig::ModelError,
    xdig::EvalError,
    xdig::tensor::TensorError,
    xdig::matrix::MatrixError,
    serde_json::Error,
);

/// IO errors get the offending path attached.
pub fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::config(format!("{}: {e}", path.display()))
}

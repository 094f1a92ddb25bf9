use std::fmt;

use crate::ops::Monomial;

/// A single violated configuration field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every field that failed validation, in the order they were checked.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl ConfigErrors {
    pub fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            field: field.into(),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.0.iter().any(|e| e.field == field)
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(ConfigErrors),

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("Fock cutoff {cutoff} too small: discarded probability mass {tail_mass:e}")]
    Truncation { cutoff: usize, tail_mass: f64 },

    #[error("degenerate reference: {0}")]
    DegenerateReference(&'static str),

    #[error("trajectory {trajectory} diverged at tau = {tau} (step {step})")]
    Divergence {
        trajectory: u64,
        step: u64,
        tau: f64,
    },

    #[error("moment {0} is not available from this source")]
    MissingMoment(Monomial),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) => 2,
            Error::Divergence { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

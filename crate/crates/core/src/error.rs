use std::fmt;

use thiserror::Error;

/// Structural errors raised while evaluating a network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {what} has length {found}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("runtime state of neuron '{neuron}' is inconsistent with its type")]
    RuntimeMismatch { neuron: String },
    #[error("extracellular amount for transmitter {index} is negative")]
    NegativeAmount { index: usize },
}

/// One violated network invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Offending neuron, when the violation is local to one.
    pub neuron: Option<String>,
    pub message: String,
}

impl Violation {
    pub fn network(message: impl Into<String>) -> Self {
        Violation {
            neuron: None,
            message: message.into(),
        }
    }

    pub fn neuron(name: &str, message: impl Into<String>) -> Self {
        Violation {
            neuron: Some(name.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.neuron {
            Some(name) => write!(f, "neuron '{name}': {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// A network description that failed validation; carries every violation found.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError(pub Vec<Violation>);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for violation in &self.0 {
            if !first {
                f.write_str("; ")?;
            }
            write!(f, "{violation}")?;
            first = false;
        }
        Ok(())
    }
}

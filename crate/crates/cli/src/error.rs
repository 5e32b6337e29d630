use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Numerical,
}

/// A failure tagged with the module and operation that raised it.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub module: &'static str,
    pub op: &'static str,
    pub message: String,
}

impl CliError {
    pub fn usage(module: &'static str, op: &'static str, message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Usage, module, op, message: message.into() }
    }

    pub fn numerical(module: &'static str, op: &'static str, message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Numerical, module, op, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => 1,
            ErrorKind::Numerical => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}: {}", self.module, self.op, self.message)
    }
}

impl std::error::Error for CliError {}

/// Attaches the originating module and operation to a core result.
pub trait At<T> {
    fn at(self, module: &'static str, op: &'static str) -> Result<T, CliError>;
}

impl<T> At<T> for capq_core::Result<T> {
    fn at(self, module: &'static str, op: &'static str) -> Result<T, CliError> {
        self.map_err(|e| {
            let kind = match e {
                capq_core::Error::InvalidInput(_) => ErrorKind::Usage,
                _ => ErrorKind::Numerical,
            };
            CliError { kind, module, op, message: e.to_string() }
        })
    }
}

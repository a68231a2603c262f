use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned message produced while reading the text DSLs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            file: None,
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub fn with_file(mut self, file: &str) -> Self {
        self.file = Some(file.to_string());
        self
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.file {
            Some(file) => write!(f, "{file}:{}:{}: {sev}: {}", self.line, self.column, self.message),
            None => write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Parse(Vec<ParseDiagnostic>),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unsupported-exact: {0}")]
    UnsupportedExact(String),
    #[error("strategy error: {0}")]
    Strategy(String),
    #[error("invalid lasso: {0}")]
    InvalidLasso(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

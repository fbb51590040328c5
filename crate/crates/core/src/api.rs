//! Request and response bodies of the HTTP service.

use serde::{Deserialize, Serialize};

use crate::config::FuzzConfig;
use crate::error::Error;

/// Largest contract source the service accepts, in bytes.
pub const MAX_SOURCE_BYTES: usize = 256 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRequest {
    pub source: String,
    #[serde(default)]
    pub config: FuzzConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCreated {
    pub run_id: String,
}

/// JSON error payload. `line` and `column` are set for parse errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<u32>,
}

impl ErrorBody {
    pub fn new(error: &str, message: impl Into<String>) -> Self {
        ErrorBody {
            error: error.to_owned(),
            message: message.into(),
            line: None,
            column: None,
        }
    }
}

impl From<&Error> for ErrorBody {
    fn from(err: &Error) -> Self {
        match err {
            Error::Parse(p) => ErrorBody {
                line: Some(p.line),
                column: Some(p.column),
                ..ErrorBody::new("parse", &p.message)
            },
            Error::Config(c) => ErrorBody::new("config", &c.0),
            Error::Usage(u) => ErrorBody::new("usage", u.to_string()),
            Error::Model(m) => ErrorBody::new("model", m.to_string()),
        }
    }
}

impl std::fmt::Display for ErrorBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{} error at {l}:{c}: {}", self.error, self.message),
            _ => write!(f, "{} error: {}", self.error, self.message),
        }
    }
}

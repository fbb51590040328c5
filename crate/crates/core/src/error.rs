use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minisol::Span;

/// Lexical, syntactic or semantic fault in MiniSol source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            line: span.line,
            column: span.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

/// A call that cannot be dispatched at all, as opposed to one that reverts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UsageError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("caller {caller} is out of range for {num_users} users")]
    UnknownCaller { caller: u32, num_users: u32 },
    #[error("function `{function}` takes {expected} arguments, got {got}")]
    ArgumentCount {
        function: String,
        expected: usize,
        got: usize,
    },
    #[error("argument {position} of `{function}` must be {expected}")]
    ArgumentType {
        function: String,
        position: usize,
        expected: crate::value::ValueType,
    },
    #[error("call sequence is empty")]
    EmptySequence,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("contract has no functions to call")]
pub struct ModelError;

/// Any failure of the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

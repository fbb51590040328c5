//! Contract simulation pipeline: parse a MiniSol contract, explore it with a
//! coverage-guided fuzzer, and derive the per-call analytics an explorer UI
//! renders.

pub mod api;
pub mod config;
pub mod document;
pub mod error;
pub mod fuzz;
pub mod minisol;
pub mod trace;
pub mod value;
pub mod vm;

pub use config::FuzzConfig;
pub use error::{ConfigError, Error, ModelError, ParseError, UsageError};
pub use fuzz::{fuzz, FuzzResult};

pub use document::{export, fuzz_source, parse_document, replay_source, ResultDocument};
pub use minisol::{extract_interface, parse, ContractModel};
pub use value::{Address, Literal, ValueType};
pub use vm::{replay, CallRecord, FunctionCall, Simulation, WorldState};

//! Deterministic contract execution with full-rollback reverts.
//!
//! Every call moves its value from the caller to the contract, runs the
//! function body, and on any revert restores the world to exactly its
//! pre-call state. Each call yields a [`CallRecord`] with the effects an
//! explorer visualizes: inflow, internal transactions, value-type state
//! changes, balances afterwards and the branch sites it executed.

mod exec;
mod random;
mod world;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::FuzzConfig;
use crate::error::{Error, UsageError};
use crate::minisol::{ContractModel, SiteId};
use crate::value::{decimal, Literal};

pub use exec::execute_call;
pub use random::draw_random;
pub use world::{init_world, BalanceSnapshot, StorageValue, WorldState};

/// One external invocation of a contract function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionCall {
    pub caller: u32,
    pub function: String,
    #[serde(with = "decimal")]
    pub value: u128,
    #[serde(default)]
    pub args: Vec<Literal>,
}

/// Receiver of an internal transaction. Everything outside the simulated
/// user range is aggregated into `Others`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Recipient {
    User(u32),
    Others,
}

impl fmt::Display for Recipient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipient::User(i) => write!(f, "{i}"),
            Recipient::Others => f.write_str("others"),
        }
    }
}

impl Serialize for Recipient {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Recipient::User(i) => s.serialize_u32(*i),
            Recipient::Others => s.serialize_str("others"),
        }
    }
}

impl<'de> Deserialize<'de> for Recipient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            User(u32),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::User(i) => Ok(Recipient::User(i)),
            Repr::Tag(t) if t == "others" => Ok(Recipient::Others),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("unknown recipient `{t}`"))),
        }
    }
}

/// Value sent by the contract to another address during a call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InternalTransaction {
    pub to: Recipient,
    #[serde(with = "decimal")]
    pub value: u128,
}

/// A value-type state variable that differs after a call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateChange {
    pub var: String,
    pub old: Literal,
    pub new: Literal,
    /// `new - old`, for uint variables only.
    #[serde(with = "decimal::option")]
    pub delta: Option<i128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevertReason {
    NonPayable,
    InsufficientBalance,
    RequireFailed,
    TransferExceedsBalance,
    ArithmeticOverflow,
    DivisionByZero,
    IndexOutOfRange,
    RandomBoundZero,
}

impl fmt::Display for RevertReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RevertReason::NonPayable => "value sent to a non-payable function",
            RevertReason::InsufficientBalance => "caller cannot afford the value",
            RevertReason::RequireFailed => "require condition failed",
            RevertReason::TransferExceedsBalance => "transfer exceeds contract balance",
            RevertReason::ArithmeticOverflow => "arithmetic overflow or underflow",
            RevertReason::DivisionByZero => "division by zero",
            RevertReason::IndexOutOfRange => "array index out of range",
            RevertReason::RandomBoundZero => "random(0)",
        })
    }
}

/// A call together with everything it did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub index: usize,
    pub call: FunctionCall,
    pub reverted: bool,
    pub revert_reason: Option<RevertReason>,
    /// Value actually received by the contract.
    #[serde(with = "decimal")]
    pub inflow: u128,
    pub internal_txs: Vec<InternalTransaction>,
    pub state_changes: Vec<StateChange>,
    pub balances_after: BalanceSnapshot,
    pub covered_sites: BTreeSet<SiteId>,
}

impl CallRecord {
    pub fn outflow(&self) -> u128 {
        self.internal_txs.iter().map(|t| t.value).sum()
    }
}

/// A replayed call sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simulation {
    pub calls: Vec<CallRecord>,
    pub coverage: BTreeSet<SiteId>,
}

impl Simulation {
    pub fn sequence(&self) -> Vec<FunctionCall> {
        self.calls.iter().map(|r| r.call.clone()).collect()
    }
}

/// Runs `sequence` on a freshly deployed world.
pub fn replay(
    model: &ContractModel,
    config: &FuzzConfig,
    sequence: &[FunctionCall],
) -> Result<Simulation, Error> {
    if sequence.is_empty() {
        return Err(UsageError::EmptySequence.into());
    }
    let mut world = init_world(model, config)?;
    let mut calls = Vec::with_capacity(sequence.len());
    let mut coverage = BTreeSet::new();
    for (index, call) in sequence.iter().enumerate() {
        let record = execute_call(&mut world, model, call, index)?;
        coverage.extend(record.covered_sites.iter().copied());
        calls.push(record);
    }
    Ok(Simulation { calls, coverage })
}

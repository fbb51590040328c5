use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::FuzzConfig;
use crate::error::ConfigError;
use crate::minisol::{ContractModel, VarType, OWNER_VAR};
use crate::value::{decimal, Address, Literal};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StorageValue {
    Uint(u128),
    Address(Address),
    /// Zero entries are never stored.
    Mapping(BTreeMap<Address, u128>),
    Array(Vec<Address>),
}

impl StorageValue {
    pub fn default_for(ty: VarType) -> Self {
        match ty {
            VarType::Uint => StorageValue::Uint(0),
            VarType::Address => StorageValue::Address(Address::Null),
            VarType::Mapping => StorageValue::Mapping(BTreeMap::new()),
            VarType::AddressArray => StorageValue::Array(Vec::new()),
        }
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            StorageValue::Uint(v) => Some(Literal::Uint(*v)),
            StorageValue::Address(a) => Some(Literal::Address(*a)),
            _ => None,
        }
    }
}

impl From<Literal> for StorageValue {
    fn from(lit: Literal) -> Self {
        match lit {
            Literal::Uint(v) => StorageValue::Uint(v),
            Literal::Address(a) => StorageValue::Address(a),
        }
    }
}

/// Balances of every account class at one instant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSnapshot {
    #[serde(with = "decimal")]
    pub contract: u128,
    #[serde(with = "decimal::vec")]
    pub users: Vec<u128>,
    /// Cumulative value received by addresses outside the user set.
    #[serde(with = "decimal")]
    pub others: u128,
}

/// Everything a call can observe or change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldState {
    pub contract_balance: u128,
    pub user_balances: Vec<u128>,
    pub others_balance: u128,
    pub storage: BTreeMap<String, StorageValue>,
    pub rng_seed: u64,
    /// Number of successful calls so far; keys the random draws.
    pub call_counter: u64,
}

impl WorldState {
    pub fn num_users(&self) -> u32 {
        self.user_balances.len() as u32
    }

    pub fn balances(&self) -> BalanceSnapshot {
        BalanceSnapshot {
            contract: self.contract_balance,
            users: self.user_balances.clone(),
            others: self.others_balance,
        }
    }

    /// Total value held across contract, users and the others bucket.
    pub fn total_supply(&self) -> u128 {
        self.contract_balance + self.user_balances.iter().sum::<u128>() + self.others_balance
    }
}

/// Deploys `model`: every user holds the endowment, the contract holds
/// nothing, and storage takes its declared initial values.
pub fn init_world(model: &ContractModel, config: &FuzzConfig) -> Result<WorldState, ConfigError> {
    config.validate()?;
    let mut storage = BTreeMap::new();
    for var in &model.state_vars {
        let value = match &var.initializer {
            Some(lit) => StorageValue::from(*lit),
            None => StorageValue::default_for(var.var_type),
        };
        storage.insert(var.name.clone(), value);
    }
    storage.insert(
        OWNER_VAR.to_string(),
        StorageValue::Address(Address::Index(config.owner_index)),
    );
    Ok(WorldState {
        contract_balance: 0,
        user_balances: vec![config.endowment; config.num_users as usize],
        others_balance: 0,
        storage,
        rng_seed: config.rng_seed,
        call_counter: 0,
    })
}

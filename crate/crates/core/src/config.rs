use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::value::decimal;

/// Scenario and budget settings for a fuzzing run. Missing fields take
/// their defaults when deserialized.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzConfig {
    pub num_users: u32,
    #[serde(with = "decimal")]
    pub endowment: u128,
    pub owner_index: u32,
    pub iteration_budget: u64,
    #[serde(with = "decimal")]
    pub rng_seed: u64,
    #[serde(with = "decimal")]
    pub max_value_per_call: u128,
    pub max_sequence_length: usize,
    pub max_simulations: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            num_users: 3,
            endowment: 100,
            owner_index: 0,
            iteration_budget: 2000,
            rng_seed: 42,
            max_value_per_call: 10,
            max_sequence_length: 16,
            max_simulations: 12,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_users == 0 {
            return Err(ConfigError("num_users must be at least 1".into()));
        }
        if self.owner_index >= self.num_users {
            return Err(ConfigError(format!(
                "owner_index {} is out of range for {} users",
                self.owner_index, self.num_users
            )));
        }
        if self.endowment == 0 {
            return Err(ConfigError("endowment must be positive".into()));
        }
        if self
            .endowment
            .checked_mul(u128::from(self.num_users))
            .is_none()
        {
            return Err(ConfigError("total endowment overflows 128 bits".into()));
        }
        if self.max_sequence_length == 0 {
            return Err(ConfigError("max_sequence_length must be at least 1".into()));
        }
        if self.max_simulations == 0 {
            return Err(ConfigError("max_simulations must be at least 1".into()));
        }
        Ok(())
    }
}

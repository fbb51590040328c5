use rand::Rng;

use crate::config::FuzzConfig;
use crate::error::ModelError;
use crate::minisol::{ContractModel, FunctionDecl};
use crate::value::{Address, Literal, ValueType};
use crate::vm::FunctionCall;

/// Draws a random call: function and caller uniform, value uniform up to
/// the configured cap for payable functions and zero otherwise.
pub fn generate_call<R: Rng + ?Sized>(
    model: &ContractModel,
    config: &FuzzConfig,
    rng: &mut R,
) -> Result<FunctionCall, ModelError> {
    if model.functions.is_empty() {
        return Err(ModelError);
    }
    let func = &model.functions[rng.gen_range(0..model.functions.len())];
    let caller = rng.gen_range(0..config.num_users);
    let (value, args) = generate_inputs(func, config, rng);
    Ok(FunctionCall {
        caller,
        function: func.name.clone(),
        value,
        args,
    })
}

/// Fresh value and arguments for a call of `func`.
pub fn generate_inputs<R: Rng + ?Sized>(
    func: &FunctionDecl,
    config: &FuzzConfig,
    rng: &mut R,
) -> (u128, Vec<Literal>) {
    let value = if func.payable {
        rng.gen_range(0..=config.max_value_per_call)
    } else {
        0
    };
    let args = func
        .params
        .iter()
        .map(|p| match p.ty {
            ValueType::Uint => Literal::Uint(boundary_biased_uint(config, rng)),
            ValueType::Address => {
                Literal::Address(Address::Index(rng.gen_range(0..config.num_users)))
            }
        })
        .collect();
    (value, args)
}

fn boundary_biased_uint<R: Rng + ?Sized>(config: &FuzzConfig, rng: &mut R) -> u128 {
    match rng.gen_range(0..4) {
        0 => 0,
        1 => 1,
        2 => rng.gen_range(2..=10),
        _ => config.max_value_per_call,
    }
}

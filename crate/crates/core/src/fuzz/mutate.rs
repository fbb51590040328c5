use rand::seq::SliceRandom;
use rand::Rng;

use super::generate::{generate_call, generate_inputs};
use crate::config::FuzzConfig;
use crate::minisol::ContractModel;
use crate::vm::FunctionCall;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationOp {
    Insert,
    Delete,
    ReplaceInputs,
    ReplaceCaller,
    Duplicate,
    SwapAdjacent,
}

impl MutationOp {
    pub const ALL: [MutationOp; 6] = [
        MutationOp::Insert,
        MutationOp::Delete,
        MutationOp::ReplaceInputs,
        MutationOp::ReplaceCaller,
        MutationOp::Duplicate,
        MutationOp::SwapAdjacent,
    ];

    fn applicable(self, len: usize) -> bool {
        match self {
            MutationOp::Delete | MutationOp::SwapAdjacent => len > 1,
            _ => true,
        }
    }
}

/// Applies one uniformly chosen mutation operator to a copy of `sequence`.
pub fn mutate<R: Rng + ?Sized>(
    sequence: &[FunctionCall],
    model: &ContractModel,
    config: &FuzzConfig,
    rng: &mut R,
) -> Vec<FunctionCall> {
    mutate_with_op(sequence, model, config, rng).0
}

/// Like [`mutate`], also reporting the operator that was applied. Operators
/// that cannot apply to the sequence's length are excluded from the draw.
pub fn mutate_with_op<R: Rng + ?Sized>(
    sequence: &[FunctionCall],
    model: &ContractModel,
    config: &FuzzConfig,
    rng: &mut R,
) -> (Vec<FunctionCall>, MutationOp) {
    assert!(!sequence.is_empty(), "cannot mutate an empty sequence");
    let mut seq = sequence.to_vec();
    let ops: Vec<_> = MutationOp::ALL
        .into_iter()
        .filter(|op| op.applicable(seq.len()))
        .collect();
    let op = *ops.choose(rng).expect("replace operators always apply");

    match op {
        MutationOp::Insert => {
            let call = generate_call(model, config, rng).expect("seeded sequences imply functions");
            let at = rng.gen_range(0..=seq.len());
            seq.insert(at, call);
        }
        MutationOp::Delete => {
            let at = rng.gen_range(0..seq.len());
            seq.remove(at);
        }
        MutationOp::ReplaceInputs => {
            let at = rng.gen_range(0..seq.len());
            let func = model
                .function(&seq[at].function)
                .expect("sequence calls known functions");
            let (value, args) = generate_inputs(func, config, rng);
            seq[at].value = value;
            seq[at].args = args;
        }
        MutationOp::ReplaceCaller => {
            let at = rng.gen_range(0..seq.len());
            seq[at].caller = rng.gen_range(0..config.num_users);
        }
        MutationOp::Duplicate => {
            let at = rng.gen_range(0..seq.len());
            let copy = seq[at].clone();
            seq.insert(at + 1, copy);
        }
        MutationOp::SwapAdjacent => {
            let at = rng.gen_range(0..seq.len() - 1);
            seq.swap(at, at + 1);
        }
    }
    seq.truncate(config.max_sequence_length.max(1));
    (seq, op)
}

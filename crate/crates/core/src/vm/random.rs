use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RevertReason;

/// Uniform draw from `[0, bound)` keyed by the world seed, the count of
/// successful calls and the draw's ordinal within the current call.
pub fn draw_random(
    seed: u64,
    call_counter: u64,
    ordinal: u32,
    bound: u128,
) -> Result<u128, RevertReason> {
    if bound == 0 {
        return Err(RevertReason::RandomBoundZero);
    }
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&call_counter.to_le_bytes());
    key[16..20].copy_from_slice(&ordinal.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    Ok(rng.gen_range(0..bound))
}

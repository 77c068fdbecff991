//! Keyed random streams. Every stochastic routine derives its generator
//! from a master seed plus a tuple of stream identifiers, so results are
//! independent of thread schedule and worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based stream generator keyed by `(seed, ids...)`.
pub fn stream(seed: u64, ids: &[u64]) -> ChaCha8Rng {
    let mut state = seed ^ 0x6c62_272e_07bb_0142;
    let _ = splitmix64(&mut state);
    for &id in ids {
        state ^= id.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let _ = splitmix64(&mut state);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

//! Seed derivation.
//!
//! A single master seed fans out into independent streams with a counter
//! scheme: the master is mixed with SplitMix64, then each path component
//! (dataset id, model id, fold id, tree index, ...) is folded in as
//! `state = mix(state ^ mix(component + GAMMA))`. The resulting `u64` seeds a
//! ChaCha8 generator. Because each stream depends only on its path, results do
//! not depend on the order (or thread) in which jobs run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master), |state, &component| {
        mix(state ^ mix(component.wrapping_add(GAMMA)))
    })
}

pub fn stream(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit id for a name (FNV-1a), so that seeds keyed by model or
/// dataset name survive roster reordering.
pub fn name_id(name: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in name.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

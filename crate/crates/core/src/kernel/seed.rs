//! Per-component random streams.
//!
//! A master seed is mixed with a 64-bit FNV-1a digest of the component path
//! through the SplitMix64 finalizer. The finalizer is a bijection on `u64`,
//! so for a fixed path distinct master seeds always give distinct component
//! seeds. Component streams are `ChaCha8Rng` generators seeded from the
//! derived value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |hash, &b| {
        (hash ^ u64::from(b)).wrapping_mul(FNV_PRIME)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable seed for the component at `path` under `master_seed`.
pub fn derive_component_seed(master_seed: u64, path: &str) -> u64 {
    splitmix64(master_seed ^ splitmix64(fnv1a(path.as_bytes())))
}

/// Random stream owned by one component.
pub fn component_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

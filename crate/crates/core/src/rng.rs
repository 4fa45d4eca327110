//! Seed handling. All randomness in the pipeline flows from a single root
//! seed, fanned out per stage name so each stage is independently
//! reproducible regardless of which other stages ran.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic, platform-independent RNG used by every sampling stage.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a stage seed from the root seed and a stage label.
///
/// FNV-1a over the label mixed with splitmix64; stable across platforms and
/// releases because it is pinned here rather than delegated to a hasher
/// implementation.
pub fn stage_seed(root: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in stage.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(root ^ h)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

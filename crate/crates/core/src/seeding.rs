//! Deterministic seed fan-out.
//!
//! Every random stream in the crate is a `ChaCha8Rng` whose seed is derived
//! from a base seed and a path of tags, so independent jobs and parallel
//! chunks never share state and results do not depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Module tags for substreams.
pub mod tag {
    pub const DEGSEQ: u64 = 0x6465_6773;
    pub const GRAPH: u64 = 0x6772_6170;
    pub const WALK: u64 = 0x7761_6c6b;
    pub const POOL: u64 = 0x706f_6f6c;
    pub const SAMPLE_LN: u64 = 0x6c6e_6e6e;
    pub const TREE: u64 = 0x7472_6565;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream(seed: u64, path: &[u64]) -> Rng {
    rng(derive(seed, path))
}

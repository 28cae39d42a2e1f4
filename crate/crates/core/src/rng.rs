//! Seed derivation.
//!
//! All randomness flows from 64-bit seeds. Independent streams (graph
//! disorder, spin updates, contamination, per-replicate work) are obtained by
//! hashing the parent seed together with a domain tag and an index, so no two
//! consumers ever share a stream and results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere in the crate.
pub type StreamRng = ChaCha8Rng;

/// Domain tags for [`derive_seed`].
pub mod domain {
    pub const GRAPH: u64 = 0x6772_6170_6800_0001;
    pub const SPINS: u64 = 0x7370_696e_7300_0002;
    pub const CONTAMINATION: u64 = 0x636f_6e74_6100_0003;
    pub const REPLICATE: u64 = 0x7265_706c_6900_0004;
    pub const SEARCH: u64 = 0x7365_6172_6300_0005;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for stream `index` of `domain` under `seed`.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(domain)) ^ splitmix64(index.wrapping_add(domain)))
}

/// A generator for stream `index` of `domain` under `seed`.
pub fn stream(seed: u64, domain: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, domain, index))
}

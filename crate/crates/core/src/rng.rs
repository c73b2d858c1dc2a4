//! Deterministic random streams keyed by (seed, index path).
//!
//! Every unit of parallel work (a tree, a permutation repeat) gets its own
//! ChaCha stream so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream `index` of the generator keyed by `seed` and `domain`.
///
/// `domain` separates unrelated consumers (tree growth vs. permutation
/// importance) that share a user seed.
pub fn stream(seed: u64, domain: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(domain)));
    rng.set_stream(index);
    rng
}

/// Domain tag for per-tree streams.
pub const TREE_DOMAIN: u64 = 0x7472_6565;
/// Domain tag for permutation importance; the FPC index is folded in too.
pub const PERMUTATION_DOMAIN: u64 = 0x7065_726d;

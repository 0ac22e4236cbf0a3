//! Deterministic random streams.
//!
//! Every stochastic component draws from a ChaCha8 generator seeded through
//! [`derive_seed`], which mixes a base seed with a list of integer tags
//! (repetition index, grid cell index, purpose code). Identical seeds and tags
//! therefore reproduce identical runs on any platform, while distinct tags
//! give streams that do not collide.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Finalizer from splitmix64. Bijective on u64, breaks up low-entropy inputs.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mix a base seed with a sequence of tags into a new 64-bit seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut acc = mix(seed ^ 0x6a09_e667_f3bc_c908);
    for &t in tags {
        acc = mix(acc.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(mix(t)));
    }
    acc
}

/// A ChaCha8 stream for the given seed and tags.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, tags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_tags_same_stream() {
        let a: Vec<u64> = (0..8).map(|_| stream(7, &[1, 2]).random()).collect();
        let b: Vec<u64> = (0..8).map(|_| stream(7, &[1, 2]).random()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn different_tags_diverge() {
        let mut a = stream(7, &[1, 2]);
        let mut b = stream(7, &[2, 1]);
        let xs: Vec<u64> = (0..4).map(|_| a.random()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.random()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn tag_order_matters() {
        assert_ne!(derive_seed(0, &[1, 2]), derive_seed(0, &[2, 1]));
        assert_ne!(derive_seed(0, &[0]), derive_seed(0, &[]));
    }
}

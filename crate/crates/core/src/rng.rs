//! Seeded randomness.
//!
//! Every generator draws from ChaCha8 (`rand_chacha` 0.3) seeded with a
//! 64-bit value through `SeedableRng::seed_from_u64`, and uses the sampling
//! algorithms of `rand` 0.8. Both are value-stable across platforms, so a
//! (parameters, seed) pair always yields the same instance.
//!
//! Derived seeds come from [`derive_seed`]: each component is folded in with
//! the SplitMix64 finalizer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub const PRNG_NAME: &str = "chacha8/rand_chacha-0.3";

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `master`, in order.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(master), |acc, &p| mix64(acc ^ mix64(p)))
}

/// Stable 64-bit key for a string label (FNV-1a).
pub fn label_key(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn stream_is_pinned() {
        // guards against silent PRNG/version changes
        let mut r = rng(42);
        let a: u64 = r.gen();
        let mut r2 = rng(42);
        assert_eq!(a, r2.gen::<u64>());
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
    }
}

//! Seeded randomness. Every random choice in the crate flows from a `u64` seed
//! through these helpers, so runs are reproducible across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer: a bijection on `u64` with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed. For a fixed master seed this is injective in `index`, and for a
/// fixed index it is injective in `master`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(index.wrapping_mul(GOLDEN)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derive_seed_is_stable() {
        // frozen values guard against accidental changes to the mixing
        assert_eq!(derive_seed(0, 0), mix64(mix64(0)));
        assert_eq!(derive_seed(42, 7), 0x4782_c4b4_c4fd_f7c9);
        assert_eq!(mix64(0), 0);
        assert_eq!(mix64(1), 0x5692_161d_100b_05e5);
    }

    #[test]
    fn neighbouring_indices_differ() {
        let mut rng = seeded_rng(1);
        for _ in 0..10_000 {
            let s: u64 = rng.random();
            assert_ne!(derive_seed(s, 0), derive_seed(s, 1));
        }
    }

    #[test]
    fn single_bit_master_change_avalanches() {
        let mut rng = seeded_rng(2);
        let mut total_flipped = 0u64;
        for t in 0..10_000u64 {
            let s: u64 = rng.random();
            let bit = 1u64 << (t % 64);
            let d = derive_seed(s, t) ^ derive_seed(s ^ bit, t);
            assert_ne!(d, 0);
            total_flipped += d.count_ones() as u64;
        }
        let mean = total_flipped as f64 / 10_000.0;
        assert!((mean - 32.0).abs() < 1.0, "mean flipped bits {mean}");
    }
}

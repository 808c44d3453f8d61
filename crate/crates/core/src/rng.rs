//! Seeded randomness.
//!
//! All sampling goes through [`Rng64`], which is `Xoshiro256PlusPlus` seeded
//! from a single `u64` via SplitMix64 (increment `0x9E3779B97F4A7C15`,
//! mixers `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`). Uniform doubles
//! are built from the top 53 bits of each output, so a sequence of draws is
//! reproducible from the seed in any language.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng64 = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Rng64 {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Uniform draw in the open interval (0, 1).
pub fn open_unit(rng: &mut Rng64) -> f64 {
    loop {
        let x = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if x > 0.0 {
            return x;
        }
    }
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform(rng: &mut Rng64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
}

/// Flat Dirichlet weights: normalized unit exponentials. Every entry is
/// strictly positive.
pub fn dirichlet_flat(rng: &mut Rng64, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| -open_unit(rng).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Index in `0..n`, by rejection-free multiply-shift.
pub fn index(rng: &mut Rng64, n: usize) -> usize {
    ((rng.next_u64() as u128 * n as u128) >> 64) as usize
}

//! Seedable sampling primitives for dataset generation.
//!
//! Every random draw in the die generator goes through these helpers on a
//! ChaCha8 stream (seeded via `SeedableRng::seed_from_u64`, which expands the
//! seed with SplitMix64). The algorithms are spelled out here so identically
//! seeded datasets can be reproduced outside this crate:
//!
//! * `uniform_index(n)` — `next_u64` with modulo rejection (values above the
//!   largest multiple of `n` are redrawn).
//! * `uniform_f64(lo, hi)` — top 53 bits of `next_u64` scaled into `[lo, hi)`.
//! * `shuffle` — Fisher–Yates, descending index, `j = uniform_index(i + 1)`.

use rand_core::RngCore;

/// Unbiased uniform draw from `0..n`.
pub fn uniform_index(rng: &mut impl RngCore, n: usize) -> usize {
    assert!(n > 0, "uniform_index over an empty range");
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX % n + 1) % n;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return (v % n) as usize;
        }
    }
}

/// Uniform draw from `[lo, hi)` using a 53-bit mantissa.
pub fn uniform_f64(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + u * (hi - lo)
}

/// In-place Fisher–Yates shuffle.
pub fn shuffle<T>(rng: &mut impl RngCore, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_index(rng, i + 1);
        items.swap(i, j);
    }
}

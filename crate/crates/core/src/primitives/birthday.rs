//! Code collisions among `n` uniformly random codes of a fixed length.

use crate::rng::RandomSource;

/// Union bound on the probability that some two of `n` uniform
/// `code_len`-bit codes coincide: `n(n−1) / 2^(code_len+1)`.
pub fn birthday_no_collision_bound(n: u64, code_len: u32) -> f64 {
    assert!(n >= 2 && code_len >= 1);
    (n as f64) * ((n - 1) as f64) / 2f64.powi(code_len as i32 + 1)
}

/// Exact collision probability `1 − Π_{i<n} (1 − i/2^L)`.
pub fn birthday_collision_exact(n: u64, code_len: u32) -> f64 {
    assert!(n >= 2 && code_len >= 1);
    let space = 2f64.powi(code_len as i32);
    let log_none: f64 = (1..n).map(|i| (1.0 - i as f64 / space).max(0.0).ln()).sum();
    1.0 - log_none.exp()
}

/// Fraction of `samples` draws of `n` codes that contain a duplicate.
pub fn birthday_collision_monte_carlo(n: u64, code_len: u32, samples: u64, src: &mut RandomSource) -> f64 {
    assert!(n >= 2 && (1..=63).contains(&code_len) && samples >= 1);
    let space = 1u64 << code_len;
    let mut codes = Vec::with_capacity(n as usize);
    let mut hits = 0u64;
    for _ in 0..samples {
        codes.clear();
        codes.extend((0..n).map(|_| src.below_u64(space)));
        codes.sort_unstable();
        if codes.windows(2).any(|w| w[0] == w[1]) {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

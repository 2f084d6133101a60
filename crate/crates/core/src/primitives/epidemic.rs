//! One-way epidemic: a receiver adopts the sender's infection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::rng::RandomSource;

/// Interactions until one initially infected agent has infected all `n`.
pub fn epidemic_run(n: u32, src: &mut RandomSource) -> u64 {
    assert!(n >= 2, "epidemic needs n >= 2");
    let mut infected = vec![false; n as usize];
    infected[0] = true;
    let mut k = 1u32;
    let mut interactions = 0u64;
    while k < n {
        let (r, s) = src.ordered_pair(n);
        interactions += 1;
        if infected[s as usize] && !infected[r as usize] {
            infected[r as usize] = true;
            k += 1;
        }
    }
    interactions
}

/// `Σ_{k=1}^{n-1} n(n-1) / (k(n-k))`: the exact expected number of
/// interactions, since with `k` infected the next interaction infects with
/// probability `k(n-k) / (n(n-1))`.
///
/// The familiar `4 ln n` parallel-time figure is an upper bound on this
/// value divided by `n`, not the value itself.
pub fn epidemic_expected_interactions_exact(n: u64) -> BigRational {
    assert!(n >= 2, "epidemic needs n >= 2");
    let pairs = BigInt::from(n) * BigInt::from(n - 1);
    (1..n).fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(pairs.clone(), BigInt::from(k) * BigInt::from(n - k))
    })
}

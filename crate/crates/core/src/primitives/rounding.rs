//! Exhaustive check of the rounding step `⌊M/x + 1/2⌋ = n`.
//!
//! With `M = k·n^(c+2)`, every integer `x` in `[M/n − n^c, M/n + n^c]`
//! should round back to `n` whenever `k ≥ 3`.

use num_bigint::BigUint;

use crate::protocol::size_estimate;

/// First `(n, M, x)` in `2..=n_max` where `size_estimate(M, x) ≠ n`, with
/// `M = factor · n^(c+2)`.
pub fn rounding_counterexample(n_max: u64, c: u32, factor: u64) -> Option<(u64, BigUint, BigUint)> {
    assert!(n_max >= 2, "n_max must be at least 2");
    assert!(c <= 2, "c must be 0, 1 or 2");
    for n in 2..=n_max {
        let n_big = BigUint::from(n);
        let m = BigUint::from(factor) * n_big.pow(c + 2);
        // M/n is an integer here, so the interval endpoints are too
        let centre = &m / &n_big;
        let radius = n_big.pow(c);
        let lo = if centre > radius {
            &centre - &radius
        } else {
            BigUint::from(1u32)
        };
        let hi = &centre + &radius;
        let mut x = lo;
        while x <= hi {
            if size_estimate(&m, &x).as_ref() != Some(&n_big) {
                return Some((n, m, x));
            }
            x += 1u32;
        }
    }
    None
}

/// True iff `M = 3n^(c+2)` rounds correctly for every `n ≤ n_max` and every
/// `x` within `n^c` of `M/n`.
pub fn rounding_check(n_max: u64, c: u32) -> bool {
    rounding_counterexample(n_max, c, 3).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_three_always_rounds() {
        assert!(rounding_check(200, 0));
        assert!(rounding_check(200, 1));
        assert!(rounding_check(40, 2));
    }

    #[test]
    fn factor_two_breaks() {
        let (n, m, x) = rounding_counterexample(200, 0, 2).expect("counterexample");
        // n = 2, M = 8, x = 3: 8/3 + 1/2 rounds to 3
        assert_eq!((n, m, x), (2, BigUint::from(8u32), BigUint::from(3u32)));
        assert!(rounding_counterexample(200, 1, 2).is_some());
    }
}

//! Seeded randomness shared by every simulation.
//!
//! A [`RandomSource`] wraps a ChaCha8 stream. Code bits are handed out one
//! at a time from a 64-bit buffer so that `rand_bits(m)` consumes exactly `m`
//! bits; scheduler draws use whole words. Same seed, same call sequence, same
//! output.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;

/// Anything that can hand out uniformly random code bits.
///
/// The protocol transition functions are generic over this so tests can
/// inject exact bit sequences (see [`ScriptedBits`]).
pub trait RandomBits {
    /// Returns `m ≥ 1` fresh random bits.
    fn rand_bits(&mut self, m: usize) -> BitString;
}

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and a path of
/// indices (e.g. `[n, trial]`).
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |acc, &x| mix64(acc ^ mix64(x)))
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
    buf: u64,
    buf_left: u32,
    bits_consumed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            buf: 0,
            buf_left: 0,
            bits_consumed: 0,
        }
    }

    /// Stream for trial `trial` of an experiment seeded with `master`.
    pub fn for_trial(master: u64, trial: u64) -> Self {
        Self::new(derive_seed(master, &[trial]))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of code bits handed out so far through [`RandomBits::rand_bits`] / [`Self::bit`].
    pub fn bits_consumed(&self) -> u64 {
        self.bits_consumed
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        if self.buf_left == 0 {
            self.buf = self.rng.next_u64();
            self.buf_left = 64;
        }
        let b = self.buf >> 63 == 1;
        self.buf <<= 1;
        self.buf_left -= 1;
        self.bits_consumed += 1;
        b
    }

    /// Uniform integer in `[0, bound)`.
    #[inline]
    pub fn below(&mut self, bound: u32) -> u32 {
        debug_assert!(bound > 0);
        self.rng.random_range(0..bound)
    }

    #[inline]
    pub fn below_u64(&mut self, bound: u64) -> u64 {
        self.rng.random_range(0..bound)
    }

    /// Uniform ordered pair `(receiver, sender)` of distinct indices in `[0, n)`.
    #[inline]
    pub fn ordered_pair(&mut self, n: u32) -> (u32, u32) {
        assert!(n >= 2, "need at least two agents to pick a pair");
        let receiver = self.below(n);
        let mut sender = self.below(n - 1);
        if sender >= receiver {
            sender += 1;
        }
        (receiver, sender)
    }
}

impl RandomBits for RandomSource {
    fn rand_bits(&mut self, m: usize) -> BitString {
        assert!(m >= 1, "rand_bits requires m >= 1");
        let mut out = BitString::new();
        for _ in 0..m {
            out.push(self.bit());
        }
        out
    }
}

/// A bit source that replays a fixed script, for hand-executed transitions.
///
/// Panics if asked for more bits than were scripted.
#[derive(Debug, Clone)]
pub struct ScriptedBits {
    bits: BitString,
    pos: usize,
}

impl ScriptedBits {
    pub fn new(bits: BitString) -> Self {
        Self { bits, pos: 0 }
    }

    /// Script from a `0`/`1` literal.
    pub fn from_literal(s: &str) -> Self {
        Self::new(s.parse().expect("scripted bits must be 0/1"))
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl RandomBits for ScriptedBits {
    fn rand_bits(&mut self, m: usize) -> BitString {
        assert!(m >= 1, "rand_bits requires m >= 1");
        assert!(
            m <= self.remaining(),
            "script exhausted: wanted {m}, have {}",
            self.remaining()
        );
        let out = self.bits.slice(self.pos, self.pos + m);
        self.pos += m;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bits() {
        let a = RandomSource::new(99).rand_bits(4);
        let b = RandomSource::new(99).rand_bits(4);
        assert_eq!(a.len(), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn successive_calls_advance_stream() {
        let mut src = RandomSource::new(5);
        let first = src.rand_bits(8);
        let second = src.rand_bits(8);
        assert_eq!(src.bits_consumed(), 16);
        let whole = RandomSource::new(5).rand_bits(16);
        assert_eq!(first.append(&second), whole);
    }

    #[test]
    #[should_panic(expected = "m >= 1")]
    fn zero_bits_is_contract_violation() {
        RandomSource::new(1).rand_bits(0);
    }

    #[test]
    fn single_bits_are_balanced() {
        // 10^6 draws: 3σ binomial interval around 1/2 is ±0.0015
        let mut src = RandomSource::new(2024);
        let ones = (0..1_000_000).filter(|_| src.rand_bits(1).get(0)).count();
        let frac = ones as f64 / 1e6;
        assert!((0.497..=0.503).contains(&frac), "fraction of ones {frac}");
    }

    #[test]
    fn pairs_are_distinct_and_cover_n2() {
        let mut src = RandomSource::new(3);
        let mut seen = [0u32; 2];
        for _ in 0..10_000 {
            let (r, s) = src.ordered_pair(2);
            assert_ne!(r, s);
            seen[r as usize] += 1;
        }
        // 1/2 each, 3σ = 150
        assert!(seen.iter().all(|&c| (4850..=5150).contains(&c)), "{seen:?}");
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, &[100, 0]);
        let b = derive_seed(7, &[100, 1]);
        let c = derive_seed(7, &[1000, 0]);
        let d = derive_seed(8, &[100, 0]);
        assert!(a != b && a != c && a != d && b != c);
        assert_eq!(a, derive_seed(7, &[100, 0]));
    }

    #[test]
    fn scripted_bits_replay() {
        let mut s = ScriptedBits::from_literal("1101");
        assert_eq!(s.rand_bits(2).to_string(), "11");
        assert_eq!(s.rand_bits(2).to_string(), "01");
        assert_eq!(s.remaining(), 0);
    }
}

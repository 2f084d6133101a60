//! Packed variable-length binary strings.
//!
//! Codes are stored MSB-first inside 64-bit words, so comparing two words as
//! integers compares the corresponding bit runs lexicographically. Bits past
//! `len` are always zero, which keeps the derived `Eq`/`Hash` meaningful.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::Error;

const WORD: usize = 64;

/// A binary string of arbitrary length. The empty string is valid.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: SmallVec<[u64; 2]>,
    len: usize,
}

#[inline]
fn mask_high(bits: usize) -> u64 {
    // keeps the first `bits` (most significant) bits of a word
    match bits {
        0 => 0,
        WORD.. => u64::MAX,
        b => !(u64::MAX >> b),
    }
}

impl BitString {
    pub fn new() -> Self {
        Self {
            words: SmallVec::new(),
            len: 0,
        }
    }

    /// Builds a string from the low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 holds at most 64 bits");
        let mut out = Self::new();
        if len > 0 {
            out.words.push(value << (WORD - len));
            out.words[0] &= mask_high(len);
            out.len = len;
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at zero-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (WORD - 1 - i % WORD)) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        let offset = self.len % WORD;
        if offset == 0 {
            self.words.push(0);
        }
        if bit {
            let last = self.words.len() - 1;
            self.words[last] |= 1 << (WORD - 1 - offset);
        }
        self.len += 1;
    }

    /// Appends `other` in place.
    pub fn extend_from(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    /// Concatenation `self · other` as a new string.
    pub fn append(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Zero-based half-open slice `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(
            start <= end && end <= self.len,
            "slice {start}..{end} of length {}",
            self.len
        );
        let mut out = BitString::new();
        for i in start..end {
            out.push(self.get(i));
        }
        out
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.len <= other.len && self.cmp_prefix(other, self.len) == Ordering::Equal
    }

    /// Compares the first `p` bits of both strings. Both must have length ≥ `p`.
    fn cmp_prefix(&self, other: &BitString, p: usize) -> Ordering {
        let full = p / WORD;
        for w in 0..full {
            match self.words[w].cmp(&other.words[w]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        let rest = p % WORD;
        if rest == 0 {
            return Ordering::Equal;
        }
        let m = mask_high(rest);
        (self.words[full] & m).cmp(&(other.words[full] & m))
    }

    /// True iff `self[1..p]` is strictly lexicographically smaller than
    /// `other[1..p]`, where `p = min(|self|, |other|)`. Equal prefixes give false.
    pub fn lex_precedes(&self, other: &BitString) -> bool {
        let p = self.len.min(other.len);
        self.cmp_prefix(other, p) == Ordering::Less
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0`/`1` characters. `""` and `"ε"` give the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BitString::new();
        if s == "ε" {
            return Ok(out);
        }
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(Error::InvalidBit(other)),
            }
        }
        Ok(out)
    }
}

/// Free-function form of [`BitString::append`].
pub fn append(a: &BitString, b: &BitString) -> BitString {
    a.append(b)
}

/// Free-function form of [`BitString::lex_precedes`].
pub fn lex_precedes(a: &BitString, b: &BitString) -> bool {
    a.lex_precedes(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn lex_precedes_examples() {
        assert!(lex_precedes(&bs("01"), &bs("10")));
        assert!(!lex_precedes(&bs("10"), &bs("1011")));
        assert!(!lex_precedes(&bs(""), &bs("0110")));
        assert!(!lex_precedes(&bs("0110"), &bs("")));
        assert!(!lex_precedes(&bs("1011"), &bs("10")));
        assert!(lex_precedes(&bs("0110"), &bs("10")));
    }

    #[test]
    fn append_examples() {
        assert_eq!(append(&bs("01"), &bs("10")), bs("0110"));
        assert_eq!(append(&BitString::new(), &bs("1")), bs("1"));
        assert_eq!(append(&bs("1"), &BitString::new()), bs("1"));
    }

    #[test]
    fn parse_rejects_non_binary() {
        assert!(matches!("012".parse::<BitString>(), Err(Error::InvalidBit('2'))));
        assert_eq!("ε".parse::<BitString>().unwrap(), BitString::new());
    }

    #[test]
    fn crosses_word_boundaries() {
        let a = BitString::from_u64(u64::MAX, 64);
        let b = a.append(&bs("0101"));
        assert_eq!(b.len(), 68);
        assert!(a.is_prefix_of(&b));
        assert_eq!(b.slice(63, 68), bs("10101"));
        let mut c = a.clone();
        c.push(true);
        assert!(b.lex_precedes(&c));
        assert_eq!(b.to_string().len(), 68);
    }

    #[test]
    fn from_u64_masks() {
        assert_eq!(BitString::from_u64(0b1011, 4), bs("1011"));
        assert_eq!(BitString::from_u64(0xff, 3), bs("111"));
        assert_eq!(BitString::from_u64(7, 0), BitString::new());
    }

    fn arb_bits(max: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(any::<bool>(), 0..max).prop_map(|v| {
            let mut s = BitString::new();
            for b in v {
                s.push(b);
            }
            s
        })
    }

    fn same_len_triple() -> impl Strategy<Value = (BitString, BitString, BitString)> {
        (0usize..150).prop_flat_map(|len| {
            let one = proptest::collection::vec(any::<bool>(), len);
            (one.clone(), one.clone(), one).prop_map(|(a, b, c)| {
                let mk = |v: Vec<bool>| {
                    let mut s = BitString::new();
                    v.into_iter().for_each(|x| s.push(x));
                    s
                };
                (mk(a), mk(b), mk(c))
            })
        })
    }

    proptest! {
        #[test]
        fn append_is_associative_with_identity(a in arb_bits(100), b in arb_bits(100), c in arb_bits(100)) {
            prop_assert_eq!(a.append(&b).append(&c), a.append(&b.append(&c)));
            prop_assert_eq!(a.append(&BitString::new()), a.clone());
            prop_assert_eq!(BitString::new().append(&a), a.clone());
            let ab = a.append(&b);
            prop_assert_eq!(ab.len(), a.len() + b.len());
            prop_assert!(a.is_prefix_of(&ab));
        }

        #[test]
        fn lex_precedes_is_strict_order_on_equal_lengths((a, b, c) in same_len_triple()) {
            prop_assert!(!a.lex_precedes(&a));
            prop_assert!(!(a.lex_precedes(&b) && b.lex_precedes(&a)));
            // trichotomy
            let n = [a.lex_precedes(&b), b.lex_precedes(&a), a == b].iter().filter(|x| **x).count();
            prop_assert_eq!(n, 1);
            if a.lex_precedes(&b) && b.lex_precedes(&c) {
                prop_assert!(a.lex_precedes(&c));
            }
            // agrees with comparing the textual form
            prop_assert_eq!(a.lex_precedes(&b), a.to_string() < b.to_string() && a != b);
        }

        #[test]
        fn lex_precedes_never_symmetric(a in arb_bits(140), b in arb_bits(140)) {
            prop_assert!(!(a.lex_precedes(&b) && b.lex_precedes(&a)));
        }
    }
}

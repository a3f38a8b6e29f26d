//! n-bit strings, read left to right: bit `t` (1-based) is the `t`-th
//! character of the rendered string, i.e. the most significant bit first.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_BITS: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: u64,
    n: u32,
}

impl BitString {
    pub fn new(bits: u64, n: u32) -> Result<Self> {
        if n > MAX_BITS {
            return Err(Error::invalid(format!("bitstrings limited to {MAX_BITS} bits")));
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::invalid(format!("{bits:#b} does not fit in {n} bits")));
        }
        Ok(BitString { bits, n })
    }

    pub fn ones(n: u32) -> Self {
        BitString {
            bits: mask(n),
            n,
        }
    }

    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Bit `t`, `1 <= t <= n`, counted from the left.
    pub fn bit(&self, t: u32) -> bool {
        debug_assert!((1..=self.n).contains(&t));
        (self.bits >> (self.n - t)) & 1 == 1
    }

    /// `1^n ⊕ self`.
    pub fn complement(&self) -> Self {
        BitString {
            bits: !self.bits & mask(self.n),
            n: self.n,
        }
    }

    /// Bitwise inner product mod 2.
    pub fn dot(&self, other: &BitString) -> u32 {
        (self.bits & other.bits).count_ones() & 1
    }

    pub fn xor(&self, other: &BitString) -> Self {
        BitString {
            bits: self.bits ^ other.bits,
            n: self.n,
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in 1..=self.n {
            f.write_str(if self.bit(t) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `A(weight)`: all n-bit strings of the given Hamming weight, ascending
/// (which is lexicographic order of the rendered strings).
pub fn hamming_set(weight: u32, n: u32) -> Result<Vec<BitString>> {
    if weight > n {
        return Err(Error::invalid(format!("weight {weight} exceeds length {n}")));
    }
    if n > MAX_BITS {
        return Err(Error::invalid(format!("bitstrings limited to {MAX_BITS} bits")));
    }
    Ok(WeightIter::new(weight, n).map(|bits| BitString { bits, n }).collect())
}

/// Gosper's hack: successive integers with a fixed popcount.
pub(crate) struct WeightIter {
    next: Option<u64>,
    limit: u64,
}

impl WeightIter {
    pub(crate) fn new(weight: u32, n: u32) -> Self {
        WeightIter {
            next: Some(mask(weight)),
            limit: 1u64 << n,
        }
    }
}

impl Iterator for WeightIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        if cur >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(v: &[BitString]) -> Vec<String> {
        v.iter().map(|b| b.to_string()).collect()
    }

    #[test]
    fn small_hamming_sets() {
        assert_eq!(render(&hamming_set(1, 2).unwrap()), ["01", "10"]);
        assert_eq!(render(&hamming_set(0, 3).unwrap()), ["000"]);
        assert_eq!(hamming_set(2, 4).unwrap().len(), 6);
        assert_eq!(render(&hamming_set(3, 3).unwrap()), ["111"]);
        assert!(hamming_set(3, 2).is_err());
    }

    #[test]
    fn hamming_sets_cover_all_strings() {
        for n in 0..=10 {
            let mut all: Vec<u64> = (0..=n)
                .flat_map(|w| hamming_set(w, n).unwrap())
                .map(|b| b.value())
                .collect();
            assert_eq!(all.len(), 1 << n);
            all.sort();
            all.dedup();
            assert_eq!(all.len(), 1 << n);
        }
    }

    #[test]
    fn complement_and_dot() {
        let i = BitString::new(0b0110, 4).unwrap();
        assert_eq!(i.complement().to_string(), "1001");
        assert_eq!(i.xor(&i.complement()), BitString::ones(4));
        let l = BitString::new(0b1110, 4).unwrap();
        assert_eq!(l.dot(&i), 0);
        assert_eq!(l.dot(&i.complement()), 1);
        assert!(i.bit(2) && !i.bit(1));
    }
}

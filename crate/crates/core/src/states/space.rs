use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One party's computational basis: words of length `len` over an alphabet of
/// `alphabet` symbols, numbered from `first_symbol`.
///
/// A block of `n` qubits is `2^n+0` (bitstrings), a GHZ party with `L` levels
/// is `L^1+0`, and a party of an `n`-fold Dicke power over `d` symbols is
/// `d^n+1`. The basis index of a word is its value in base `alphabet` with
/// the first symbol most significant, so index order is lexicographic word
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalSpace {
    pub alphabet: u32,
    pub len: u32,
    pub first_symbol: u32,
}

impl LocalSpace {
    pub fn new(alphabet: u32, len: u32, first_symbol: u32) -> Result<Self> {
        if alphabet < 1 || len < 1 {
            return Err(Error::invalid(format!(
                "local space needs alphabet >= 1 and len >= 1, got {alphabet}^{len}"
            )));
        }
        let space = LocalSpace {
            alphabet,
            len,
            first_symbol,
        };
        space.try_dim()?;
        Ok(space)
    }

    pub fn bits(n: u32) -> Self {
        LocalSpace {
            alphabet: 2,
            len: n,
            first_symbol: 0,
        }
    }

    pub fn levels(levels: u32) -> Self {
        LocalSpace {
            alphabet: levels,
            len: 1,
            first_symbol: 0,
        }
    }

    pub fn symbols(d: u32, len: u32) -> Self {
        LocalSpace {
            alphabet: d,
            len,
            first_symbol: 1,
        }
    }

    fn try_dim(&self) -> Result<u64> {
        (self.alphabet as u64)
            .checked_pow(self.len)
            .ok_or_else(|| Error::invalid(format!("local space {self} is too large")))
    }

    pub fn dim(&self) -> u64 {
        (self.alphabet as u64).pow(self.len)
    }

    /// The space holding the concatenation of a word from `self` and one from
    /// `other`.
    pub fn concat(&self, other: &LocalSpace) -> Result<LocalSpace> {
        if self.alphabet != other.alphabet || self.first_symbol != other.first_symbol {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate words of {self} and {other}"
            )));
        }
        LocalSpace::new(self.alphabet, self.len + other.len, self.first_symbol)
    }

    pub fn word(&self, index: u64) -> Vec<u32> {
        let a = self.alphabet as u64;
        let mut out = vec![0; self.len as usize];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = (rest % a) as u32 + self.first_symbol;
            rest /= a;
        }
        out
    }

    pub fn index_of(&self, word: &[u32]) -> Result<u64> {
        if word.len() != self.len as usize {
            return Err(Error::DimensionMismatch(format!(
                "word of length {} in {self}",
                word.len()
            )));
        }
        let mut index = 0u64;
        for &s in word {
            if s < self.first_symbol || s - self.first_symbol >= self.alphabet {
                return Err(Error::invalid(format!("symbol {s} outside {self}")));
            }
            index = index * self.alphabet as u64 + (s - self.first_symbol) as u64;
        }
        Ok(index)
    }

    pub fn render(&self, index: u64) -> String {
        let word = self.word(index);
        if self.alphabet + self.first_symbol <= 10 {
            word.iter().map(|s| char::from(b'0' + *s as u8)).collect()
        } else {
            word.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn parse_label(&self, s: &str) -> Result<u64> {
        let word: Vec<u32> = if s.contains('.') || self.alphabet + self.first_symbol > 10 {
            s.split('.')
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad label {s:?}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad label {s:?}"))))
                .collect::<Result<_>>()?
        };
        self.index_of(&word)
    }
}

impl fmt::Display for LocalSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}+{}", self.alphabet, self.len, self.first_symbol)
    }
}

impl FromStr for LocalSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad local space {s:?}, expected A^L+F"));
        let (a, rest) = s.split_once('^').ok_or_else(bad)?;
        let (l, f) = rest.split_once('+').ok_or_else(bad)?;
        LocalSpace::new(
            a.parse().map_err(|_| bad())?,
            l.parse().map_err(|_| bad())?,
            f.parse().map_err(|_| bad())?,
        )
    }
}

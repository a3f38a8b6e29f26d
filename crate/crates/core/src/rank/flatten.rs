use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::states::{Amplitude, Limits, LocalSpace, MultiIndex, PureState};

/// Split of the parties `0..parties` into two nonempty blocks. Rendered and
/// parsed with 1-based party numbers, e.g. `{1}|{2,3}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// `left` holds 0-based party indices.
    pub fn new(mut left: Vec<usize>, parties: usize) -> Result<Self> {
        left.sort_unstable();
        left.dedup();
        if left.iter().any(|&p| p >= parties) {
            return Err(Error::invalid(format!("cut {left:?} names a party >= {parties}")));
        }
        let right: Vec<usize> = (0..parties).filter(|p| !left.contains(p)).collect();
        if left.is_empty() || right.is_empty() {
            return Err(Error::invalid("both sides of a cut must be nonempty"));
        }
        Ok(Bipartition { left, right })
    }

    /// First `⌊N/2⌋` parties against the rest.
    pub fn half(parties: usize) -> Result<Self> {
        Bipartition::new((0..parties / 2).collect(), parties)
    }

    /// Every cut with party 0 on the left (each unordered split once).
    pub fn all(parties: usize) -> Vec<Bipartition> {
        if parties < 2 {
            return Vec::new();
        }
        (0u64..1 << (parties - 1))
            .filter_map(|mask| {
                let left: Vec<usize> = std::iter::once(0)
                    .chain((1..parties).filter(|p| mask >> (p - 1) & 1 == 1))
                    .collect();
                Bipartition::new(left, parties).ok()
            })
            .collect()
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn parties(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// Parses `half`, `{1}|{2,3}`, `1|2,3` or just the left block `1,2`
    /// (1-based).
    pub fn parse(s: &str, parties: usize) -> Result<Self> {
        let s = s.trim();
        if s == "half" {
            return Bipartition::half(parties);
        }
        let left = s.split('|').next().unwrap_or_default();
        let left = left
            .trim_matches(|c| c == '{' || c == '}')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&p| p >= 1)
                    .map(|p| p - 1)
                    .ok_or_else(|| Error::Parse(format!("bad cut {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Bipartition::new(left, parties)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[usize]| v.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", side(&self.left), side(&self.right))
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Needs the party count, so only explicit `left|right` forms parse here.
    fn from_str(s: &str) -> Result<Self> {
        let (l, r) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("cut {s:?} needs both sides")))?;
        let count = |side: &str| side.trim_matches(|c| c == '{' || c == '}').split(',').count();
        Bipartition::parse(s, count(l) + count(r))
    }
}

/// Flattening restricted to the rows and columns that carry a nonzero entry
/// (dropping all-zero rows and columns leaves the rank unchanged).
#[derive(Debug, Clone)]
pub struct Flattening<T> {
    pub cut: Bipartition,
    /// Full row / column dimensions before compaction.
    pub full_shape: (u128, u128),
    pub row_keys: Vec<Vec<u64>>,
    pub col_keys: Vec<Vec<u64>>,
    pub entries: BTreeMap<(usize, usize), T>,
}

impl<T: Amplitude> Flattening<T> {
    pub fn shape(&self) -> (usize, usize) {
        (self.row_keys.len(), self.col_keys.len())
    }

    pub fn to_dense(&self, limits: &Limits) -> Result<Vec<Vec<T>>> {
        let (r, c) = self.shape();
        limits.check_entries("dense flattening", r as u128 * c as u128)?;
        let mut m = vec![vec![T::zero(); c]; r];
        for (&(i, j), v) in &self.entries {
            m[i][j] = v.clone();
        }
        Ok(m)
    }
}

/// Rows indexed by the left parties' labels, columns by the right parties'.
pub fn flatten<T: Amplitude>(state: &PureState<T>, cut: &Bipartition) -> Result<Flattening<T>> {
    if cut.parties() != state.num_parties() {
        return Err(Error::DimensionMismatch(format!(
            "cut over {} parties applied to a {}-party state",
            cut.parties(),
            state.num_parties()
        )));
    }
    let dims = state.local_dims();
    let full = |side: &[usize]| side.iter().map(|&p| dims[p] as u128).product::<u128>();
    let full_shape = (full(&cut.left), full(&cut.right));
    let pick = |idx: &MultiIndex, side: &[usize]| side.iter().map(|&p| idx.parties()[p]).collect::<Vec<u64>>();
    let mut rows: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut cols: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for (idx, _) in state.iter() {
        rows.entry(pick(idx, &cut.left)).or_insert(0);
        cols.entry(pick(idx, &cut.right)).or_insert(0);
    }
    for (i, v) in rows.values_mut().enumerate() {
        *v = i;
    }
    for (i, v) in cols.values_mut().enumerate() {
        *v = i;
    }
    let entries = state
        .iter()
        .map(|(idx, v)| ((rows[&pick(idx, &cut.left)], cols[&pick(idx, &cut.right)]), v.clone()))
        .collect();
    Ok(Flattening {
        cut: cut.clone(),
        full_shape,
        row_keys: rows.into_keys().collect(),
        col_keys: cols.into_keys().collect(),
        entries,
    })
}

/// Merges each side of the cut into a single party whose word is the
/// concatenation of its members' words, in party order.
pub fn group_parties<T: Amplitude>(state: &PureState<T>, cut: &Bipartition) -> Result<PureState<T>> {
    let merged = |side: &[usize]| -> Result<LocalSpace> {
        let spaces = state.spaces();
        side[1..]
            .iter()
            .try_fold(spaces[side[0]], |acc, &p| acc.concat(&spaces[p]))
    };
    let spaces = vec![merged(&cut.left)?, merged(&cut.right)?];
    let combine = |idx: &MultiIndex, side: &[usize]| {
        side.iter()
            .fold(0u64, |acc, &p| acc * state.spaces()[p].dim() + idx.parties()[p])
    };
    PureState::from_terms(
        spaces,
        state
            .iter()
            .map(|(idx, v)| (MultiIndex(vec![combine(idx, &cut.left), combine(idx, &cut.right)]), v.clone())),
    )
}

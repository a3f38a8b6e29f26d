use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::amplitude::{Amplitude, Backend};
use super::space::LocalSpace;
use crate::error::{Error, Result};
use crate::report::Verification;

/// Size caps applied before any construction whose output grows
/// exponentially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of stored entries (or dense matrix cells) a single
    /// construction may produce.
    pub max_entries: usize,
    /// Maximum number of phase-index values summed by the Dicke phase
    /// identity.
    pub max_phase_indices: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_entries: 10_000_000,
            max_phase_indices: 1_000_000,
        }
    }
}

impl Limits {
    pub fn check_entries(&self, what: &'static str, requested: u128) -> Result<()> {
        if requested > self.max_entries as u128 {
            return Err(Error::cap(what, format!("{requested} entries"), self.max_entries));
        }
        Ok(())
    }
}

/// One local basis index per party.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u64>);

impl MultiIndex {
    pub fn parties(&self) -> &[u64] {
        &self.0
    }

    pub fn render(&self, spaces: &[LocalSpace]) -> String {
        self.0
            .iter()
            .zip(spaces)
            .map(|(&i, s)| s.render(i))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl From<Vec<u64>> for MultiIndex {
    fn from(v: Vec<u64>) -> Self {
        MultiIndex(v)
    }
}

/// Sparse, unnormalized N-party pure state.
///
/// Entries are kept in a `BTreeMap`, so iteration (and every serialized form)
/// follows lexicographic multi-index order. Zero amplitudes are never stored.
#[derive(Clone, PartialEq)]
pub struct PureState<T> {
    spaces: Vec<LocalSpace>,
    entries: BTreeMap<MultiIndex, T>,
}

impl<T: Amplitude> PureState<T> {
    pub fn zero(spaces: Vec<LocalSpace>) -> Self {
        PureState {
            spaces,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a state by summing the given terms; repeated indices accumulate
    /// and cancelled entries are dropped.
    pub fn from_terms<I>(spaces: Vec<LocalSpace>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, T)>,
    {
        let mut acc = Accumulator::new(spaces.len());
        for (idx, amp) in terms {
            check_index(&spaces, &idx)?;
            acc.add(idx, &amp)?;
        }
        Ok(acc.into_state(spaces))
    }

    pub(crate) fn from_map_unchecked(spaces: Vec<LocalSpace>, entries: BTreeMap<MultiIndex, T>) -> Self {
        debug_assert!(entries.values().all(|v| !v.is_zero()));
        PureState { spaces, entries }
    }

    pub fn backend(&self) -> Backend {
        T::BACKEND
    }

    pub fn num_parties(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[LocalSpace] {
        &self.spaces
    }

    pub fn local_dims(&self) -> Vec<u64> {
        self.spaces.iter().map(LocalSpace::dim).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<&T> {
        self.entries.get(idx)
    }

    pub fn contains(&self, idx: &MultiIndex) -> bool {
        self.entries.contains_key(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.entries.keys()
    }

    /// Reinterprets the local spaces without touching indices, e.g. to read a
    /// `{1,2}` word as a bitstring. Dimensions must agree party by party.
    pub fn with_spaces(mut self, spaces: Vec<LocalSpace>) -> Result<Self> {
        if spaces.len() != self.spaces.len()
            || spaces.iter().zip(&self.spaces).any(|(a, b)| a.dim() != b.dim())
        {
            return Err(Error::DimensionMismatch(
                "relabelled spaces must keep every local dimension".into(),
            ));
        }
        self.spaces = spaces;
        Ok(self)
    }

    pub fn map<U: Amplitude>(&self, f: impl Fn(&T) -> U) -> PureState<U> {
        let entries = self
            .entries
            .iter()
            .filter_map(|(k, v)| {
                let u = f(v);
                (!u.is_zero()).then(|| (k.clone(), u))
            })
            .collect();
        PureState {
            spaces: self.spaces.clone(),
            entries,
        }
    }

    pub fn scaled(&self, factor: &T) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, v) in &self.entries {
            let u = v.try_mul(factor)?;
            if !u.is_zero() {
                entries.insert(k.clone(), u);
            }
        }
        Ok(PureState {
            spaces: self.spaces.clone(),
            entries,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut acc = Accumulator::new(self.num_parties());
        for (k, v) in self.iter().chain(other.iter()) {
            acc.add(k.clone(), v)?;
        }
        Ok(acc.into_state(self.spaces.clone()))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.spaces != other.spaces {
            return Err(Error::DimensionMismatch(format!(
                "states over {:?} and {:?}",
                render_spaces(&self.spaces),
                render_spaces(&other.spaces)
            )));
        }
        Ok(())
    }

    /// Party-wise tensor product: party `p` of the result holds the
    /// concatenation of party `p`'s words from `self` and `other`.
    pub fn tensor_product(&self, other: &Self, limits: &Limits) -> Result<Self> {
        if self.num_parties() != other.num_parties() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} parties",
                self.num_parties(),
                other.num_parties()
            )));
        }
        limits.check_entries("tensor product", self.len() as u128 * other.len() as u128)?;
        let spaces = self
            .spaces
            .iter()
            .zip(&other.spaces)
            .map(|(a, b)| a.concat(b))
            .collect::<Result<Vec<_>>>()?;
        let mut entries = BTreeMap::new();
        for (ka, va) in &self.entries {
            for (kb, vb) in &other.entries {
                let idx = ka
                    .0
                    .iter()
                    .zip(&kb.0)
                    .zip(&other.spaces)
                    .map(|((&a, &b), s)| a * s.dim() + b)
                    .collect();
                let v = va.try_mul(vb)?;
                if !v.is_zero() {
                    entries.insert(MultiIndex(idx), v);
                }
            }
        }
        Ok(PureState { spaces, entries })
    }

    /// `self^{⊗copies}` with copies grouped per party (party `p` holds a word
    /// of `copies` blocks, copy 1 leftmost).
    pub fn tensor_power(&self, copies: u32, limits: &Limits) -> Result<Self> {
        if copies == 0 {
            return Err(Error::invalid("tensor power needs at least one copy"));
        }
        let total = (self.len() as u128).checked_pow(copies).unwrap_or(u128::MAX);
        limits.check_entries("tensor power", total)?;
        let mut out = self.clone();
        for _ in 1..copies {
            out = out.tensor_product(self, limits)?;
        }
        Ok(out)
    }

    /// Compares `self` against `other` entry by entry over the union of
    /// supports. `tol = 0` demands exact equality.
    pub fn compare(&self, other: &Self, tol: f64) -> Result<Verification> {
        self.check_same_shape(other)?;
        let mut report = Verification::passed(0);
        let mut keys: Vec<&MultiIndex> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        report.entries_compared = keys.len();
        let zero = T::zero();
        for k in keys {
            let a = self.entries.get(k).unwrap_or(&zero);
            let b = other.entries.get(k).unwrap_or(&zero);
            if a == b {
                continue;
            }
            let r = a.try_sub(b)?.magnitude();
            if r > report.max_residual {
                report.max_residual = r;
            }
            if r > tol {
                report.pass = false;
                if report.first_mismatch.is_none() {
                    report.first_mismatch = Some(k.render(&self.spaces));
                }
            }
        }
        Ok(report)
    }
}

impl<T: Amplitude> fmt::Debug for PureState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (k, v) in &self.entries {
            m.entry(&k.render(&self.spaces), &v.render());
        }
        m.finish()
    }
}

pub(crate) fn render_spaces(spaces: &[LocalSpace]) -> String {
    spaces
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn check_index(spaces: &[LocalSpace], idx: &MultiIndex) -> Result<()> {
    if idx.0.len() != spaces.len() {
        return Err(Error::DimensionMismatch(format!(
            "index with {} parties in a {}-party state",
            idx.0.len(),
            spaces.len()
        )));
    }
    for (&i, s) in idx.0.iter().zip(spaces) {
        if i >= s.dim() {
            return Err(Error::DimensionMismatch(format!("label {i} outside {s}")));
        }
    }
    Ok(())
}

/// Hash-indexed amplitude accumulator; converted to canonical order once at
/// the end.
pub(crate) struct Accumulator<T> {
    parties: usize,
    map: HashMap<MultiIndex, T>,
}

impl<T: Amplitude> Accumulator<T> {
    pub(crate) fn new(parties: usize) -> Self {
        Accumulator {
            parties,
            map: HashMap::new(),
        }
    }

    pub(crate) fn add(&mut self, idx: MultiIndex, amp: &T) -> Result<()> {
        debug_assert_eq!(idx.0.len(), self.parties);
        match self.map.get_mut(&idx) {
            Some(v) => *v = v.try_add(amp)?,
            None => {
                self.map.insert(idx, amp.clone());
            }
        }
        Ok(())
    }

    pub(crate) fn len(&self) -> usize {
        self.map.len()
    }

    pub(crate) fn into_state(self, spaces: Vec<LocalSpace>) -> PureState<T> {
        let entries = self.map.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        PureState { spaces, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> PureState<i64> {
        PureState::from_terms(
            vec![LocalSpace::bits(1); 2],
            [(MultiIndex(vec![0, 0]), 1), (MultiIndex(vec![1, 1]), 1)],
        )
        .unwrap()
    }

    #[test]
    fn cancelled_terms_are_dropped() {
        let s = PureState::from_terms(
            vec![LocalSpace::bits(1)],
            [(MultiIndex(vec![0]), 1i64), (MultiIndex(vec![0]), -1), (MultiIndex(vec![1]), 2)],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&MultiIndex(vec![1])), Some(&2));
    }

    #[test]
    fn out_of_range_label_rejected() {
        let r = PureState::from_terms(vec![LocalSpace::bits(1)], [(MultiIndex(vec![2]), 1i64)]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn tensor_power_groups_copies_per_party() {
        let sq = bell().tensor_power(2, &Limits::default()).unwrap();
        assert_eq!(sq.spaces(), &[LocalSpace::bits(2), LocalSpace::bits(2)]);
        let labels: Vec<_> = sq.support().map(|k| k.render(sq.spaces())).collect();
        assert_eq!(labels, ["00,00", "01,01", "10,10", "11,11"]);
    }

    #[test]
    fn tensor_power_respects_cap() {
        let limits = Limits {
            max_entries: 7,
            ..Limits::default()
        };
        assert!(matches!(
            bell().tensor_power(3, &limits),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn compare_reports_first_mismatch() {
        let a = bell();
        let b = a.scaled(&2).unwrap();
        let v = a.compare(&b, 0.0).unwrap();
        assert!(!v.pass);
        assert_eq!(v.max_residual, 1.0);
        assert_eq!(v.first_mismatch.as_deref(), Some("0,0"));
        assert!(a.compare(&a, 0.0).unwrap().pass);
    }
}

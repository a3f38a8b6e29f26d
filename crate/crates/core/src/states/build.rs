use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::combinatorics::{multinomial, to_u128_saturating};
use super::space::LocalSpace;
use super::state::{Limits, MultiIndex, PureState};
use crate::error::{Error, Result};

/// Multiplicities `j_1 >= … >= j_d >= 1` of a Dicke state; `N = Σ j_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct DickeSpec(Vec<u32>);

impl DickeSpec {
    pub fn new(j: Vec<u32>) -> Result<Self> {
        if j.is_empty() {
            return Err(Error::invalid("Dicke spec must not be empty"));
        }
        if j.contains(&0) {
            return Err(Error::invalid(format!("Dicke multiplicities must be >= 1: {j:?}")));
        }
        if j.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!("Dicke multiplicities must be nonincreasing: {j:?}")));
        }
        Ok(DickeSpec(j))
    }

    /// `W_N` as a Dicke state: `(N-1, 1)`.
    pub fn w(parties: u32) -> Result<Self> {
        if parties < 2 {
            return Err(Error::invalid("W state needs at least 2 parties"));
        }
        DickeSpec::new(vec![parties - 1, 1])
    }

    pub fn j(&self) -> &[u32] {
        &self.0
    }

    pub fn parties(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn d(&self) -> u32 {
        self.0.len() as u32
    }

    /// Number of distinct arrangements, `N! / Π j_i!`.
    pub fn arrangement_count(&self) -> u128 {
        let parts: Vec<u64> = self.0.iter().map(|&x| x as u64).collect();
        to_u128_saturating(&multinomial(&parts))
    }

    /// Every distinct arrangement of `1^{j_1} 2^{j_2} … d^{j_d}`, in
    /// lexicographic order.
    pub fn arrangements(&self, limits: &Limits) -> Result<Vec<Vec<u32>>> {
        limits.check_entries("Dicke arrangements", self.arrangement_count())?;
        let mut word: Vec<u32> = self
            .0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i as u32 + 1, c as usize))
            .collect();
        let mut out = vec![word.clone()];
        while next_permutation(&mut word) {
            out.push(word.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for DickeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for DickeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let j = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad Dicke spec {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DickeSpec::new(j)
    }
}

/// Lexicographic successor in place; false once the last permutation is
/// reached.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Unnormalized `Σ_{l < levels} |l⟩^{⊗N}`.
pub fn build_ghz(parties: u32, levels: u32) -> Result<PureState<i64>> {
    if parties < 2 {
        return Err(Error::invalid(format!("GHZ needs N >= 2 parties, got {parties}")));
    }
    if levels < 2 {
        return Err(Error::invalid(format!("GHZ needs at least 2 levels, got {levels}")));
    }
    Ok(ghz_unchecked(parties as usize, levels))
}

pub(crate) fn ghz_unchecked<T: super::Amplitude>(parties: usize, levels: u32) -> PureState<T> {
    let entries = (0..levels as u64)
        .map(|l| (MultiIndex(vec![l; parties]), T::one()))
        .collect();
    PureState::from_map_unchecked(vec![LocalSpace::levels(levels); parties], entries)
}

/// Unnormalized sum of the N weight-one bitstrings, one qubit per party.
pub fn build_w(parties: u32) -> Result<PureState<i64>> {
    if parties < 2 {
        return Err(Error::invalid(format!("W needs N >= 2 parties, got {parties}")));
    }
    let n = parties as usize;
    let entries = (0..n)
        .map(|p| {
            let mut idx = vec![0u64; n];
            idx[p] = 1;
            (MultiIndex(idx), 1)
        })
        .collect();
    Ok(PureState::from_map_unchecked(vec![LocalSpace::bits(1); n], entries))
}

/// Unnormalized Dicke state: coefficient 1 on every distinct arrangement of
/// the word `1^{j_1} … d^{j_d}`; party `p` holds symbol `p` of the word.
pub fn build_dicke(spec: &DickeSpec, limits: &Limits) -> Result<PureState<i64>> {
    let d = spec.d();
    let space = LocalSpace::symbols(d, 1);
    let entries = spec
        .arrangements(limits)?
        .into_iter()
        .map(|w| (MultiIndex(w.iter().map(|&s| (s - 1) as u64).collect()), 1))
        .collect();
    Ok(PureState::from_map_unchecked(
        vec![space; spec.parties() as usize],
        entries,
    ))
}

/// Counts of symbols `2..=d` in `word` (symbol `1` is implicit).
pub fn characteristic_vector(word: &[u32], d: u32) -> Result<Vec<u32>> {
    if d == 0 {
        return Err(Error::invalid("alphabet size must be >= 1"));
    }
    let mut v = vec![0; d as usize - 1];
    for &s in word {
        if s < 1 || s > d {
            return Err(Error::invalid(format!("symbol {s} outside alphabet 1..={d}")));
        }
        if s >= 2 {
            v[s as usize - 2] += 1;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::combinatorics::multinomial;

    fn labels(s: &PureState<i64>) -> Vec<String> {
        s.support().map(|k| k.render(s.spaces()).replace(',', "")).collect()
    }

    #[test]
    fn ghz_examples() {
        assert_eq!(labels(&build_ghz(3, 2).unwrap()), ["000", "111"]);
        assert_eq!(labels(&build_ghz(2, 2).unwrap()), ["00", "11"]);
        let g = build_ghz(3, 4).unwrap();
        assert_eq!(labels(&g), ["000", "111", "222", "333"]);
        assert!(g.iter().all(|(_, &v)| v == 1));
        assert!(build_ghz(1, 2).is_err());
        assert!(build_ghz(3, 1).is_err());
    }

    #[test]
    fn w_examples() {
        assert_eq!(labels(&build_w(3).unwrap()), ["001", "010", "100"]);
        assert_eq!(labels(&build_w(2).unwrap()), ["01", "10"]);
        let w4 = build_w(4).unwrap();
        assert_eq!(w4.len(), 4);
        assert!(w4.support().all(|k| k.0.iter().sum::<u64>() == 1));
        assert!(build_w(1).is_err());
    }

    #[test]
    fn dicke_examples() {
        let l = Limits::default();
        let d21 = build_dicke(&DickeSpec::new(vec![2, 1]).unwrap(), &l).unwrap();
        assert_eq!(labels(&d21), ["112", "121", "211"]);
        let d11 = build_dicke(&DickeSpec::new(vec![1, 1]).unwrap(), &l).unwrap();
        assert_eq!(labels(&d11), ["12", "21"]);
    }

    #[test]
    fn dicke_spec_validation() {
        assert!(DickeSpec::new(vec![]).is_err());
        assert!(DickeSpec::new(vec![1, 2]).is_err());
        assert!(DickeSpec::new(vec![2, 0]).is_err());
        assert_eq!("2,1,1".parse::<DickeSpec>().unwrap().parties(), 4);
    }

    #[test]
    fn dicke_w_relabel_matches_w() {
        let l = Limits::default();
        for n in 2..=8u32 {
            let d = build_dicke(&DickeSpec::w(n).unwrap(), &l).unwrap();
            let as_bits = d.with_spaces(vec![LocalSpace::bits(1); n as usize]).unwrap();
            assert_eq!(as_bits, build_w(n).unwrap(), "N = {n}");
        }
    }

    #[test]
    fn dicke_entry_count_is_multinomial() {
        let l = Limits::default();
        for j in [vec![3, 2, 1], vec![2, 2, 2], vec![4, 1], vec![1, 1, 1, 1]] {
            let spec = DickeSpec::new(j.clone()).unwrap();
            let parts: Vec<u64> = j.iter().map(|&x| x as u64).collect();
            let s = build_dicke(&spec, &l).unwrap();
            assert_eq!(s.len() as u128, to_u128_saturating(&multinomial(&parts)));
        }
    }

    #[test]
    fn dicke_respects_entry_cap() {
        let l = Limits {
            max_entries: 100,
            ..Limits::default()
        };
        let spec = DickeSpec::new(vec![1; 6]).unwrap();
        assert!(matches!(build_dicke(&spec, &l), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn characteristic_vector_examples() {
        assert_eq!(characteristic_vector(&[1, 2, 1], 2).unwrap(), [1]);
        assert_eq!(characteristic_vector(&[2, 3], 3).unwrap(), [1, 1]);
        assert_eq!(characteristic_vector(&[1, 1, 1], 3).unwrap(), [0, 0]);
        assert!(characteristic_vector(&[4], 3).is_err());
        assert!(characteristic_vector(&[0], 3).is_err());
    }
}

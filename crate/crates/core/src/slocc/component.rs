use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Verification;
use crate::states::combinatorics::{binomial, multinomial};
use crate::states::{build_w, Limits, LocalSpace, MultiIndex, PureState, WeightIter, MAX_BITS};

/// Per-party Hamming weights `(a, b, c, …)` of one component of `W_N^{⊗n}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ComponentLabel {
    parts: Vec<u32>,
    n: u32,
}

impl ComponentLabel {
    pub fn new(parts: Vec<u32>, n: u32) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::invalid("component label needs at least 2 parts"));
        }
        let sum: u64 = parts.iter().map(|&p| p as u64).sum();
        if sum != n as u64 {
            return Err(Error::invalid(format!(
                "label {parts:?} sums to {sum}, expected n = {n}"
            )));
        }
        Ok(ComponentLabel { parts, n })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn parties(&self) -> usize {
        self.parts.len()
    }

    /// Every label for `n` copies of an N-party W state, i.e. all weak
    /// compositions of `n` into `parties` parts, lexicographic.
    pub fn all(n: u32, parties: usize) -> Vec<ComponentLabel> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(parties);
        compositions(n, parties, &mut cur, &mut out);
        out.into_iter()
            .map(|parts| ComponentLabel { parts, n })
            .collect()
    }
}

fn compositions(rest: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        cur.push(rest);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for x in 0..=rest {
        cur.push(x);
        compositions(rest - x, slots - 1, cur, out);
        cur.pop();
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]_{}", parts.join(","), self.n)
    }
}

impl FromStr for ComponentLabel {
    type Err = Error;

    /// Parses `a,b,c`; `n` is taken to be the sum.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .trim_matches(|c| c == '[' || c == ']' || c == '(' || c == ')')
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad label {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let n = parts.iter().sum();
        ComponentLabel::new(parts, n)
    }
}

/// Scatters the low bits of `src` onto the set bits of `mask`, lowest first.
fn deposit(mut src: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if src & 1 == 1 {
            out |= low;
        }
        src >>= 1;
        mask ^= low;
    }
    out
}

pub(crate) fn check_copies(n: u32) -> Result<()> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::invalid(format!("copies n must be in 1..={MAX_BITS}, got {n}")));
    }
    Ok(())
}

/// `|[a,b,c,…]⟩_n`: coefficient-one sum over all `(i, j, k, …)` with
/// `h(i) = a, h(j) = b, …` and `i ⊕ j ⊕ k ⊕ … = 1^n`. Because the weights add
/// up to `n`, each bit position carries exactly one `1` across the parties.
pub fn build_component_w(n: u32, label: &ComponentLabel, limits: &Limits) -> Result<PureState<i64>> {
    check_copies(n)?;
    if label.n != n {
        return Err(Error::invalid(format!("label {label} does not match n = {n}")));
    }
    let parts: Vec<u64> = label.parts.iter().map(|&x| x as u64).collect();
    limits.check_entries(
        "W component",
        crate::states::combinatorics::to_u128_saturating(&multinomial(&parts)),
    )?;
    let parties = label.parties();
    let mut entries = BTreeMap::new();
    let mut idx = vec![0u64; parties];
    assign(&label.parts, 0, (1u64 << n) - 1, &mut idx, &mut entries);
    Ok(PureState::from_map_unchecked(
        vec![LocalSpace::bits(n); parties],
        entries,
    ))
}

fn assign(
    parts: &[u32],
    p: usize,
    free: u64,
    idx: &mut Vec<u64>,
    out: &mut BTreeMap<MultiIndex, i64>,
) {
    if p + 1 == parts.len() {
        idx[p] = free;
        out.insert(MultiIndex(idx.clone()), 1);
        return;
    }
    for pick in WeightIter::new(parts[p], free.count_ones()) {
        let bits = deposit(pick, free);
        idx[p] = bits;
        assign(parts, p + 1, free & !bits, idx, out);
    }
}

/// All components of `W_N^{⊗n}`, keyed by label; there are `C(n+N-1, N-1)`.
pub fn decompose_w_power(
    n: u32,
    parties: u32,
    limits: &Limits,
) -> Result<BTreeMap<ComponentLabel, PureState<i64>>> {
    check_copies(n)?;
    if parties < 2 {
        return Err(Error::invalid("W needs at least 2 parties"));
    }
    let total = (parties as u128).checked_pow(n).unwrap_or(u128::MAX);
    limits.check_entries("W tensor power", total)?;
    let count = binomial(n as u64 + parties as u64 - 1, parties as u64 - 1);
    limits.check_entries(
        "W components",
        crate::states::combinatorics::to_u128_saturating(&count),
    )?;
    ComponentLabel::all(n, parties as usize)
        .into_iter()
        .map(|label| {
            let state = build_component_w(n, &label, limits)?;
            Ok((label, state))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub n: u32,
    pub parties: u32,
    pub components: usize,
    pub expected_components: String,
    pub total_terms: usize,
    pub disjoint: bool,
    pub sum_matches: Verification,
    /// Every entry of component `(a, b, …)` has party weights `(a, b, …)` and
    /// XOR `1^n`.
    pub weights_consistent: bool,
    pub pass: bool,
}

/// Checks both equalities of the W-power decomposition: the components have
/// disjoint supports and add up to `build_w(N)^{⊗n}` exactly.
pub fn verify_w_decomposition(n: u32, parties: u32, limits: &Limits) -> Result<DecompositionReport> {
    let comps = decompose_w_power(n, parties, limits)?;
    let target = build_w(parties)?.tensor_power(n, limits)?;
    let mut seen = std::collections::HashSet::new();
    let mut disjoint = true;
    let mut weights_consistent = true;
    let mut terms = Vec::new();
    let all_ones = (1u64 << n) - 1;
    for (label, comp) in &comps {
        for (idx, v) in comp.iter() {
            disjoint &= seen.insert(idx.clone());
            let xor = idx.parties().iter().fold(0, |acc, &x| acc ^ x);
            weights_consistent &= xor == all_ones
                && idx
                    .parties()
                    .iter()
                    .zip(label.parts())
                    .all(|(&x, &w)| x.count_ones() == w);
            terms.push((idx.clone(), *v));
        }
    }
    let total_terms = terms.len();
    let sum = PureState::from_terms(target.spaces().to_vec(), terms)?;
    let sum_matches = sum.compare(&target, 0.0)?;
    let expected = binomial(n as u64 + parties as u64 - 1, parties as u64 - 1);
    let pass = disjoint
        && weights_consistent
        && sum_matches.pass
        && expected == (comps.len() as u64).into();
    Ok(DecompositionReport {
        n,
        parties,
        components: comps.len(),
        expected_components: expected.to_string(),
        total_terms,
        disjoint,
        sum_matches,
        weights_consistent,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(parts: &[u32]) -> ComponentLabel {
        ComponentLabel::new(parts.to_vec(), parts.iter().sum()).unwrap()
    }

    fn rendered(s: &PureState<i64>) -> Vec<String> {
        s.support().map(|k| k.render(s.spaces())).collect()
    }

    #[test]
    fn single_copy_component() {
        let c = build_component_w(1, &label(&[1, 0, 0]), &Limits::default()).unwrap();
        assert_eq!(rendered(&c), ["1,0,0"]);
    }

    #[test]
    fn two_copy_component_enumerates_xor_constraint() {
        let c = build_component_w(2, &label(&[1, 1, 0]), &Limits::default()).unwrap();
        assert_eq!(rendered(&c), ["01,10,00", "10,01,00"]);
    }

    #[test]
    fn component_size_is_multinomial() {
        let c = build_component_w(3, &label(&[1, 1, 1]), &Limits::default()).unwrap();
        assert_eq!(c.len(), 6);
        let c = build_component_w(6, &label(&[3, 2, 1]), &Limits::default()).unwrap();
        assert_eq!(c.len(), 60);
    }

    #[test]
    fn mismatched_n_rejected() {
        assert!(ComponentLabel::new(vec![1, 1, 0], 3).is_err());
        assert!(build_component_w(3, &label(&[1, 1, 0]), &Limits::default()).is_err());
    }

    #[test]
    fn decomposition_counts() {
        let l = Limits::default();
        for (n, comps, terms) in [(1, 3, 3), (2, 6, 9), (3, 10, 27)] {
            let d = decompose_w_power(n, 3, &l).unwrap();
            assert_eq!(d.len(), comps);
            assert_eq!(d.values().map(PureState::len).sum::<usize>(), terms);
        }
    }

    #[test]
    fn decomposition_verifies_for_wn() {
        let l = Limits::default();
        for parties in 2..=5 {
            for n in 1..=4 {
                let r = verify_w_decomposition(n, parties, &l).unwrap();
                assert!(r.pass, "N = {parties}, n = {n}: {r:?}");
                assert_eq!(r.total_terms, (parties as usize).pow(n));
            }
        }
    }

    #[test]
    fn deposit_scatters_bits() {
        assert_eq!(deposit(0b11, 0b1010), 0b1010);
        assert_eq!(deposit(0b01, 0b1010), 0b0010);
        assert_eq!(deposit(0b10, 0b1100), 0b1000);
    }

    #[test]
    fn label_parsing() {
        let l: ComponentLabel = "1,2,0".parse().unwrap();
        assert_eq!(l.n(), 3);
        assert_eq!(l.to_string(), "[1,2,0]_3");
        assert_eq!(ComponentLabel::all(2, 3).len(), 6);
    }
}

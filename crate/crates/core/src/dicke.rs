//! Characteristic-vector partition of `D(j_1,…,j_d)^{⊗n}` and the
//! root-of-unity identity that realizes each part from GHZ copies.
//!
//! Party `p` of the `n`-fold power holds a word `α_p` of length `n` over
//! `{1..d}`. Its characteristic vector counts the symbols `2..d`. A component
//! is indexed by the characteristic vectors of all N parties and keeps only
//! those basis terms that actually occur in the tensor power, not every
//! product of words with matching vectors.
//!
//! The identity: with `w_t = e^{2πi/t}`, a phase index `L = (l_{k,p})`,
//! `0 <= l_{k,p} <= j_k`, `μ(L) = Π_k w_{j_k+1}^{Σ_p l_{k,p}}` and
//! `f(α, L) = Π_p w_{j_{s_p}+1}^{l_{s_p,p}}` (factor 1 where `s_p = 1`),
//!
//! ```text
//! |[v_1,…,v_N]⟩_n = 1/Π_k (j_k+1)^n · Σ_L μ(L) ⊗_q ( Σ_{C(α)=v_q} f(α,L) |α⟩ )
//! ```
//!
//! Summing over `l_{k,p}` keeps exactly the terms where, at every copy `p`,
//! symbol `k` appears at `j_k` parties (mod `j_k+1`), which together with the
//! label's totals forces every copy to be an arrangement.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Verification;
use crate::slocc::{expand_terms, LocalVector, ProductTerm};
use crate::states::{
    build_dicke, next_permutation, Amplitude, DickeSpec, Limits, LocalSpace, MultiIndex, PureState,
};

pub const DEFAULT_PHASE_TOLERANCE: f64 = 1e-9;

/// Per-party characteristic vectors naming one component of `D^{⊗n}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct DickeComponentLabel {
    vectors: Vec<Vec<u32>>,
}

impl DickeComponentLabel {
    /// Checks shape, per-party totals (`Σ v_p <= n`) and the column sums
    /// `Σ_p v_p = (n·j_2, …, n·j_d)`.
    pub fn new(vectors: Vec<Vec<u32>>, spec: &DickeSpec, n: u32) -> Result<Self> {
        let parties = spec.parties() as usize;
        let width = spec.d() as usize - 1;
        if vectors.len() != parties {
            return Err(Error::invalid(format!(
                "label has {} vectors, spec {spec} has {parties} parties",
                vectors.len()
            )));
        }
        if vectors.iter().any(|v| v.len() != width) {
            return Err(Error::invalid(format!("every vector must have length d-1 = {width}")));
        }
        if vectors.iter().any(|v| v.iter().sum::<u32>() > n) {
            return Err(Error::invalid(format!("a party's vector exceeds the word length {n}")));
        }
        for k in 0..width {
            let col: u32 = vectors.iter().map(|v| v[k]).sum();
            let want = n * spec.j()[k + 1];
            if col != want {
                return Err(Error::invalid(format!(
                    "symbol {} appears {col} times across parties, expected n·j = {want}",
                    k + 2
                )));
            }
        }
        Ok(DickeComponentLabel { vectors })
    }

    pub fn vectors(&self) -> &[Vec<u32>] {
        &self.vectors
    }

    /// Parses `1;0;0` or `1/0,0;…`: parties split by `;`, entries by `,`.
    pub fn parse(s: &str, spec: &DickeSpec, n: u32) -> Result<Self> {
        let vectors = s
            .split(';')
            .map(|part| {
                part.trim()
                    .trim_matches(|c| c == '(' || c == ')')
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad label {s:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        DickeComponentLabel::new(vectors, spec, n)
    }
}

fn check_copies(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("copies n must be >= 1"));
    }
    Ok(())
}

/// Every component label with at least one contributing term.
///
/// A label is realizable exactly when each party's vector sums to at most
/// `n` and the column sums are `n·j_k`: the party-by-symbol count table then
/// has row sums `n` and column sums `n·j_k`, and such a table splits into `n`
/// single-copy arrangements (regular bipartite multigraphs decompose into
/// perfect matchings).
pub fn partition_set(n: u32, spec: &DickeSpec, limits: &Limits) -> Result<Vec<DickeComponentLabel>> {
    check_copies(n)?;
    let parties = spec.parties() as usize;
    let width = spec.d() as usize - 1;
    let totals: Vec<u32> = spec.j()[1..].iter().map(|&j| j * n).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parties);
    collect_labels(n, width, parties, totals, &mut cur, &mut out, limits)?;
    Ok(out
        .into_iter()
        .map(|vectors| DickeComponentLabel { vectors })
        .collect())
}

fn collect_labels(
    n: u32,
    width: usize,
    parties_left: usize,
    remaining: Vec<u32>,
    cur: &mut Vec<Vec<u32>>,
    out: &mut Vec<Vec<Vec<u32>>>,
    limits: &Limits,
) -> Result<()> {
    if parties_left == 1 {
        if remaining.iter().sum::<u32>() <= n {
            cur.push(remaining);
            out.push(cur.clone());
            cur.pop();
            limits.check_entries("Dicke partition set", out.len() as u128)?;
        }
        return Ok(());
    }
    let mut vectors = Vec::new();
    bounded_vectors(&remaining, n, &mut Vec::with_capacity(width), &mut vectors);
    for v in vectors {
        let rest: Vec<u32> = remaining.iter().zip(&v).map(|(r, x)| r - x).collect();
        // Later parties can absorb at most n each.
        if rest.iter().sum::<u32>() as u64 <= (parties_left as u64 - 1) * n as u64 {
            cur.push(v);
            collect_labels(n, width, parties_left - 1, rest, cur, out, limits)?;
            cur.pop();
        }
    }
    Ok(())
}

/// Vectors `v <= bounds` (entrywise) with `Σ v <= budget`, lexicographic.
fn bounded_vectors(bounds: &[u32], budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let k = cur.len();
    if k == bounds.len() {
        out.push(cur.clone());
        return;
    }
    for x in 0..=bounds[k].min(budget) {
        cur.push(x);
        bounded_vectors(bounds, budget - x, cur, out);
        cur.pop();
    }
}

/// All words of length `n` over `{1..d}` with characteristic vector `v`,
/// lexicographic.
fn words_with_vector(n: u32, v: &[u32]) -> Vec<Vec<u32>> {
    let ones = n - v.iter().sum::<u32>();
    let mut word: Vec<u32> = std::iter::repeat_n(1, ones as usize)
        .chain(
            v.iter()
                .enumerate()
                .flat_map(|(k, &c)| std::iter::repeat_n(k as u32 + 2, c as usize)),
        )
        .collect();
    let mut out = vec![word.clone()];
    while next_permutation(&mut word) {
        out.push(word.clone());
    }
    out
}

fn power_spaces(spec: &DickeSpec, n: u32) -> Vec<LocalSpace> {
    vec![LocalSpace::symbols(spec.d(), n); spec.parties() as usize]
}

/// The terms of `D^{⊗n}` whose party words have the label's characteristic
/// vectors, each with coefficient 1.
pub fn build_dicke_component(
    n: u32,
    spec: &DickeSpec,
    label: &DickeComponentLabel,
    limits: &Limits,
) -> Result<PureState<i64>> {
    check_copies(n)?;
    let label = DickeComponentLabel::new(label.vectors.clone(), spec, n)?;
    let arrangements = spec.arrangements(limits)?;
    let d = spec.d() as usize;
    // remaining[p][s-1]: how many more times party p may use symbol s.
    let mut remaining: Vec<Vec<u32>> = label
        .vectors
        .iter()
        .map(|v| {
            let mut r = Vec::with_capacity(d);
            r.push(n - v.iter().sum::<u32>());
            r.extend_from_slice(v);
            r
        })
        .collect();
    let spaces = power_spaces(spec, n);
    let parties = spaces.len();
    let mut words = vec![0u64; parties];
    let mut entries = std::collections::BTreeMap::new();
    fill_copies(
        n,
        d as u64,
        &arrangements,
        &mut remaining,
        &mut words,
        &mut entries,
        limits,
    )?;
    Ok(PureState::from_map_unchecked(spaces, entries))
}

fn fill_copies(
    copies_left: u32,
    d: u64,
    arrangements: &[Vec<u32>],
    remaining: &mut [Vec<u32>],
    words: &mut Vec<u64>,
    out: &mut std::collections::BTreeMap<MultiIndex, i64>,
    limits: &Limits,
) -> Result<()> {
    if copies_left == 0 {
        out.insert(MultiIndex(words.clone()), 1);
        limits.check_entries("Dicke component", out.len() as u128)?;
        return Ok(());
    }
    for arr in arrangements {
        if arr
            .iter()
            .zip(remaining.iter())
            .any(|(&s, rem)| rem[s as usize - 1] == 0)
        {
            continue;
        }
        for ((&s, rem), w) in arr.iter().zip(remaining.iter_mut()).zip(words.iter_mut()) {
            rem[s as usize - 1] -= 1;
            *w = *w * d + (s as u64 - 1);
        }
        fill_copies(copies_left - 1, d, arrangements, remaining, words, out, limits)?;
        for ((&s, rem), w) in arr.iter().zip(remaining.iter_mut()).zip(words.iter_mut()) {
            rem[s as usize - 1] += 1;
            *w /= d;
        }
    }
    Ok(())
}

/// Every product `⊗_p |α_p⟩` with `C(α_p) = v_p`, ignoring whether it occurs
/// in `D^{⊗n}`; a superset of the component's support.
pub fn matching_word_product(
    n: u32,
    spec: &DickeSpec,
    label: &DickeComponentLabel,
    limits: &Limits,
) -> Result<PureState<i64>> {
    check_copies(n)?;
    let space = LocalSpace::symbols(spec.d(), n);
    let terms = vec![label
        .vectors
        .iter()
        .map(|v| {
            LocalVector::from_entries(
                space,
                words_with_vector(n, v)
                    .iter()
                    .map(|w| space.index_of(w).map(|i| (i, 1i64)))
                    .collect::<Result<Vec<_>>>()?,
            )
        })
        .collect::<Result<Vec<_>>>()?];
    expand_terms(&terms, limits)
}

#[derive(Debug, Clone, Serialize)]
pub struct DickeDecompositionReport {
    pub spec: DickeSpec,
    pub n: u32,
    pub components: usize,
    pub total_terms: usize,
    pub disjoint: bool,
    pub sum_matches: Verification,
    pub pass: bool,
}

/// Checks that the components over `partition_set` are pairwise disjoint and
/// sum to `build_dicke(spec)^{⊗n}` exactly.
pub fn verify_dicke_decomposition(
    n: u32,
    spec: &DickeSpec,
    limits: &Limits,
) -> Result<DickeDecompositionReport> {
    let target = build_dicke(spec, limits)?.tensor_power(n, limits)?;
    let labels = partition_set(n, spec, limits)?;
    let mut seen = HashSet::new();
    let mut disjoint = true;
    let mut terms = Vec::new();
    for label in &labels {
        let comp = build_dicke_component(n, spec, label, limits)?;
        if comp.is_empty() {
            disjoint = false;
        }
        for (idx, v) in comp.iter() {
            disjoint &= seen.insert(idx.clone());
            terms.push((idx.clone(), *v));
        }
    }
    let total_terms = terms.len();
    let sum = PureState::from_terms(target.spaces().to_vec(), terms)?;
    let sum_matches = sum.compare(&target, 0.0)?;
    Ok(DickeDecompositionReport {
        spec: spec.clone(),
        n,
        components: labels.len(),
        total_terms,
        disjoint,
        pass: disjoint && sum_matches.pass,
        sum_matches,
    })
}

/// Powers of `e^{2πi/order}`, computed once.
#[derive(Debug, Clone)]
pub struct RootTable {
    powers: Vec<Complex64>,
}

impl RootTable {
    pub fn new(order: u32) -> Self {
        let powers = (0..order)
            .map(|e| {
                // Multiples of a quarter turn are exact.
                if (4 * e) % order == 0 {
                    match (4 * e / order) % 4 {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    }
                } else {
                    Complex64::from_polar(1.0, 2.0 * PI * e as f64 / order as f64)
                }
            })
            .collect();
        RootTable { powers }
    }

    pub fn order(&self) -> u32 {
        self.powers.len() as u32
    }

    pub fn pow(&self, e: u32) -> Complex64 {
        self.powers[(e % self.order()) as usize]
    }
}

/// Mixed-radix enumeration of `L = (l_{k,p})`, row `k` (symbol `k+2`) with
/// radix `j_{k+2} + 1`; `l_{2,1}` is the most significant digit.
#[derive(Debug, Clone)]
pub struct PhaseIndexIter {
    radices: Vec<u32>,
    n: usize,
    cur: Option<Vec<u32>>,
}

impl PhaseIndexIter {
    pub fn new(spec: &DickeSpec, n: u32) -> Self {
        let radices = spec.j()[1..].iter().map(|&j| j + 1).collect();
        let digits = (spec.d() as usize - 1) * n as usize;
        PhaseIndexIter {
            radices,
            n: n as usize,
            cur: Some(vec![0; digits]),
        }
    }

    /// `Π_{k>=2} (j_k+1)^n`.
    pub fn count(spec: &DickeSpec, n: u32) -> u128 {
        spec.j()[1..]
            .iter()
            .try_fold(1u128, |acc, &j| acc.checked_mul((j as u128 + 1).checked_pow(n)?))
            .unwrap_or(u128::MAX)
    }
}

impl Iterator for PhaseIndexIter {
    /// Flattened `l`, index `k * n + p`.
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let cur = self.cur.take()?;
        let mut next = cur.clone();
        let mut i = next.len();
        let mut done = true;
        while i > 0 {
            i -= 1;
            let radix = self.radices[i / self.n.max(1)];
            if next[i] + 1 < radix {
                next[i] += 1;
                done = false;
                break;
            }
            next[i] = 0;
        }
        if !done {
            self.cur = Some(next);
        }
        Some(cur)
    }
}

/// Per-word exponents of `w_{j_k+1}` under `L`, one entry per symbol row.
fn word_exponents(word: &[u32], l: &[u32], n: usize, rows: usize) -> Vec<u32> {
    let mut e = vec![0u32; rows];
    for (p, &s) in word.iter().enumerate() {
        if s >= 2 {
            e[s as usize - 2] += l[(s as usize - 2) * n + p];
        }
    }
    e
}

/// The right-hand product terms `μ(L) ⊗_q Σ_{C(α)=v_q} f(α,L) |α⟩`, one per
/// phase index, with `μ(L)` folded into party 1. `phase(k, e)` evaluates
/// `w_{j_{k+2}+1}^e`.
pub fn phase_terms<T: Amplitude>(
    n: u32,
    spec: &DickeSpec,
    label: &DickeComponentLabel,
    phase: &impl Fn(usize, u32) -> T,
    limits: &Limits,
) -> Result<Vec<ProductTerm<T>>> {
    check_copies(n)?;
    let label = DickeComponentLabel::new(label.vectors.clone(), spec, n)?;
    let count = PhaseIndexIter::count(spec, n);
    if count > limits.max_phase_indices as u128 {
        return Err(Error::cap(
            "phase identity",
            format!("{count} phase indices"),
            limits.max_phase_indices,
        ));
    }
    let space = LocalSpace::symbols(spec.d(), n);
    let rows = spec.d() as usize - 1;
    let nn = n as usize;
    let party_words: Vec<Vec<(u64, Vec<u32>)>> = label
        .vectors
        .iter()
        .map(|v| {
            words_with_vector(n, v)
                .into_iter()
                .map(|w| space.index_of(&w).map(|i| (i, w)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let eval = |exps: &[u32]| -> Result<T> {
        exps.iter()
            .enumerate()
            .try_fold(T::one(), |acc, (k, &e)| acc.try_mul(&phase(k, e)))
    };
    let mut out = Vec::with_capacity(count as usize);
    for l in PhaseIndexIter::new(spec, n) {
        let mu_exps: Vec<u32> = (0..rows).map(|k| l[k * nn..(k + 1) * nn].iter().sum()).collect();
        let mu = eval(&mu_exps)?;
        let mut term = Vec::with_capacity(party_words.len());
        for (q, words) in party_words.iter().enumerate() {
            let mut entries = Vec::with_capacity(words.len());
            for (idx, w) in words {
                let mut f = eval(&word_exponents(w, &l, nn, rows))?;
                if q == 0 {
                    f = f.try_mul(&mu)?;
                }
                entries.push((*idx, f));
            }
            term.push(LocalVector::from_entries(space, entries)?);
        }
        out.push(term);
    }
    Ok(out)
}

/// Whether every root order `j_k + 1` (k >= 2) is 2, so all phases are ±1.
pub fn phases_are_signs(spec: &DickeSpec) -> bool {
    spec.j()[1..].iter().all(|&j| j == 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub spec: DickeSpec,
    pub n: u32,
    pub label: DickeComponentLabel,
    pub terms_evaluated: u64,
    pub max_residual: f64,
    pub pass: bool,
}

/// Evaluates the right-hand side of the phase identity over every phase
/// index and compares with [`build_dicke_component`].
///
/// With ±1 phases the comparison is exact in integers (`Σ_L … = Z·component`
/// with `Z = 2^{n(d-1)}`); otherwise it runs in complex floats and passes when
/// the largest residual is at most `tol`.
pub fn verify_phase_identity(
    n: u32,
    spec: &DickeSpec,
    label: &DickeComponentLabel,
    tol: f64,
    limits: &Limits,
) -> Result<PhaseReport> {
    let component = build_dicke_component(n, spec, label, limits)?;
    let count = PhaseIndexIter::count(spec, n);
    let (max_residual, pass) = if phases_are_signs(spec) {
        let sum = phase_sum_exact(n, spec, label, limits)?;
        let z = i64::try_from(count).map_err(|_| Error::Overflow)?;
        let check = sum.compare(&component.scaled(&z)?, 0.0)?;
        (check.max_residual / z as f64, check.pass)
    } else {
        let sum = phase_sum_complex(n, spec, label, limits)?;
        let check = sum.compare(&component.map(|&v| Complex64::from_i64(v)), tol)?;
        (check.max_residual, check.pass)
    };
    Ok(PhaseReport {
        spec: spec.clone(),
        n,
        label: label.clone(),
        terms_evaluated: count as u64,
        max_residual,
        pass,
    })
}

/// `Σ_L μ(L) ⊗ …` without the `1/Z` prefactor, in integers. Only valid when
/// [`phases_are_signs`] holds.
pub fn phase_sum_exact(
    n: u32,
    spec: &DickeSpec,
    label: &DickeComponentLabel,
    limits: &Limits,
) -> Result<PureState<i64>> {
    if !phases_are_signs(spec) {
        return Err(Error::invalid(format!(
            "spec {spec} has phases beyond ±1; use the complex path"
        )));
    }
    let sign = |_k: usize, e: u32| if e.is_multiple_of(2) { 1i64 } else { -1 };
    let terms = phase_terms(n, spec, label, &sign, limits)?;
    sum_terms(&terms, spec, n, limits)
}

/// `1/Z · Σ_L μ(L) ⊗ …` in complex floats.
pub fn phase_sum_complex(
    n: u32,
    spec: &DickeSpec,
    label: &DickeComponentLabel,
    limits: &Limits,
) -> Result<PureState<Complex64>> {
    let tables: Vec<RootTable> = spec.j()[1..].iter().map(|&j| RootTable::new(j + 1)).collect();
    let phase = |k: usize, e: u32| tables[k].pow(e);
    let terms = phase_terms(n, spec, label, &phase, limits)?;
    let z = PhaseIndexIter::count(spec, n) as f64;
    let sum = sum_terms(&terms, spec, n, limits)?;
    sum.scaled(&Complex64::new(1.0 / z, 0.0))
}

fn sum_terms<T: Amplitude>(
    terms: &[ProductTerm<T>],
    spec: &DickeSpec,
    n: u32,
    limits: &Limits,
) -> Result<PureState<T>> {
    if terms.is_empty() {
        return Ok(PureState::zero(power_spaces(spec, n)));
    }
    expand_terms(terms, limits)
}

//! Rank bounds, the sorting-map tightness check and copy-count calculators.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::exact::rank_exact;
use super::flatten::{flatten, group_parties, Bipartition};
use crate::error::{Error, Result};
use crate::slocc::{apply_local, LocalOperator};
use crate::states::combinatorics::binomial;
use crate::states::{build_dicke, DickeSpec, Limits, LocalSpace};

/// Known lower bound on the tensor rank of `W_N^{⊗n}`:
/// `(N-1)·2^n − N + 2`.
pub fn w_power_rank_lower(parties: u32, n: u32) -> Result<BigUint> {
    if parties < 2 || n < 1 {
        return Err(Error::invalid("need N >= 2 and n >= 1"));
    }
    let big = BigUint::from(parties - 1) << n as usize;
    Ok(big + 2u32 - parties)
}

/// `|{(β_1,…,β_d) : 0 <= β_i <= j_i, Σ β_i = r}|`.
pub fn dicke_split_count(spec: &DickeSpec, r: u32) -> Result<BigUint> {
    if r > spec.parties() {
        return Err(Error::invalid(format!("r = {r} exceeds N = {}", spec.parties())));
    }
    // counts[s] = number of ways the prefix sums to s.
    let mut counts = vec![BigUint::default(); r as usize + 1];
    counts[0] = BigUint::one();
    for &j in spec.j() {
        let mut next = vec![BigUint::default(); r as usize + 1];
        for (s, c) in counts.iter().enumerate() {
            for b in 0..=j as usize {
                if s + b <= r as usize {
                    next[s + b] += c;
                }
            }
        }
        counts = next;
    }
    Ok(counts.pop().unwrap_or_default())
}

/// Operator on words of length `r` over `{1..d}` sending each word to its
/// sorted form `|1^{μ_1} 2^{μ_2} … d^{μ_d}⟩`.
pub fn sorting_map(r: u32, d: u32) -> Result<LocalOperator<i64>> {
    let space = LocalSpace::new(d, r, 1)?;
    sorting_map_on(space)
}

/// [`sorting_map`] for an arbitrary word space.
pub fn sorting_map_on(space: LocalSpace) -> Result<LocalOperator<i64>> {
    let mut op = LocalOperator::new(space, space);
    for col in 0..space.dim() {
        let mut w = space.word(col);
        w.sort_unstable();
        op.set(space.index_of(&w)?, col, 1);
    }
    Ok(op)
}

#[derive(Debug, Clone, Serialize)]
pub struct TightBoundReport {
    pub spec: DickeSpec,
    pub r: u32,
    /// `j_1 >= Σ_{i>=2} j_i`, the condition used by the counting step.
    pub sum_condition: bool,
    /// `j_1 >= Π_{i>=2} (j_i + 1)`, the stronger condition also in circulation.
    pub product_condition: bool,
    pub claimed_rank: String,
    pub split_count: String,
    pub flattening_rank: usize,
    pub rank_after_sorting: usize,
    pub pass: bool,
}

fn product_of_increments(spec: &DickeSpec) -> BigUint {
    spec.j()[1..]
        .iter()
        .fold(BigUint::one(), |acc, &j| acc * (j + 1))
}

/// Checks that the `⌊N/2⌋ | rest` flattening of `D(spec)` has rank
/// `Π_{i>=2}(j_i+1) = dicke_split_count(spec, ⌊N/2⌋)`, before and after the
/// sorting maps are applied to both blocks. Refuses specs outside the
/// tightness condition `j_1 >= Σ_{i>=2} j_i`.
pub fn verify_tight_bound(spec: &DickeSpec, limits: &Limits) -> Result<TightBoundReport> {
    let tail: u32 = spec.j()[1..].iter().sum();
    let sum_condition = spec.j()[0] >= tail;
    if !sum_condition {
        return Err(Error::NotTight(format!(
            "spec {spec} has j_1 = {} < {tail} = Σ_{{i>=2}} j_i; the bound is not claimed tight",
            spec.j()[0]
        )));
    }
    let parties = spec.parties() as usize;
    let claimed = product_of_increments(spec);
    let product_condition = BigUint::from(spec.j()[0]) >= claimed;
    let r = spec.parties() / 2;
    let state = build_dicke(spec, limits)?;
    let cut = Bipartition::half(parties)?;
    let flattening_rank = rank_exact(&flatten(&state, &cut)?.to_dense(limits)?);

    let grouped = group_parties(&state, &cut)?;
    let ops = grouped
        .spaces()
        .iter()
        .map(|&s| sorting_map_on(s))
        .collect::<Result<Vec<_>>>()?;
    let sorted = apply_local(&ops, &grouped, limits)?;
    let rank_after_sorting = rank_exact(&flatten(&sorted, &Bipartition::new(vec![0], 2)?)?.to_dense(limits)?);

    let split = dicke_split_count(spec, r)?;
    let pass = BigUint::from(flattening_rank) == claimed
        && split == claimed
        && rank_after_sorting == flattening_rank;
    Ok(TightBoundReport {
        spec: spec.clone(),
        r,
        sum_condition,
        product_condition,
        claimed_rank: claimed.to_string(),
        split_count: split.to_string(),
        flattening_rank,
        rank_after_sorting,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RateBound {
    pub spec: DickeSpec,
    /// `Σ_{i>=2} log2(j_i + 1)`.
    pub log_sum: f64,
    /// `1 / log_sum`; infinite for a product state (`d = 1`).
    pub value: f64,
    /// `1/s` when every `j_i + 1` is a power of two.
    pub exact: Option<String>,
}

/// Lower bound `(Σ_{i>=2} log2(j_i+1))^{-1}` on the GHZ → Dicke rate.
pub fn rate_lower_bound(spec: &DickeSpec) -> RateBound {
    let tail = &spec.j()[1..];
    let log_sum: f64 = tail.iter().map(|&j| ((j + 1) as f64).log2()).sum();
    let exact = tail
        .iter()
        .map(|&j| (j + 1).is_power_of_two().then(|| (j + 1).trailing_zeros()))
        .sum::<Option<u32>>()
        .filter(|&s| s > 0)
        .map(|s| format!("1/{s}"));
    RateBound {
        spec: spec.clone(),
        log_sum,
        value: if log_sum == 0.0 { f64::INFINITY } else { 1.0 / log_sum },
        exact,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RateTarget {
    /// Three-qubit W.
    W3,
    /// N-qubit W.
    WN(u32),
    Dicke(DickeSpec),
}

impl RateTarget {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "w3" {
            return Ok(RateTarget::W3);
        }
        if let Some(rest) = s.strip_prefix("wN:").or_else(|| s.strip_prefix("w:")).or_else(|| s.strip_prefix("wn:")) {
            let n = rest.parse().map_err(|_| Error::Parse(format!("bad target {s:?}")))?;
            if n < 2 {
                return Err(Error::invalid("W target needs N >= 2"));
            }
            return Ok(RateTarget::WN(n));
        }
        if let Some(rest) = s.strip_prefix("dicke:") {
            return Ok(RateTarget::Dicke(rest.parse()?));
        }
        Err(Error::Parse(format!(
            "unknown target {s:?}; expected w3, wN:<N> or dicke:<j1,j2,...>"
        )))
    }
}

/// Right-hand side `B` of the sufficient condition `2^m >= B` for
/// `GHZ_N^{⊗m} → target^{⊗n}`.
pub fn copies_bound(n: u32, target: &RateTarget) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::invalid("n must be >= 1"));
    }
    Ok(match target {
        RateTarget::W3 => binomial(n as u64 + 2, 2) << n as usize,
        RateTarget::WN(parties) => {
            binomial(n as u64 + *parties as u64 - 1, *parties as u64 - 1) << n as usize
        }
        RateTarget::Dicke(spec) => {
            let big_n = spec.parties() as u64;
            spec.j()[1..].iter().fold(BigUint::one(), |acc, &j| {
                acc * binomial(n as u64 * j as u64 + big_n - 1, big_n - 1)
                    * BigUint::from(j + 1).pow(n)
            })
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CopiesRow {
    pub n: u32,
    pub m: u64,
    pub ratio: f64,
    pub bound: String,
}

/// Smallest `m` with `2^m >= copies_bound(n, target)`; equality counts.
pub fn copies_needed(n: u32, target: &RateTarget) -> Result<CopiesRow> {
    let bound = copies_bound(n, target)?;
    let m = if bound <= BigUint::one() {
        0
    } else {
        (&bound - 1u32).bits()
    };
    Ok(CopiesRow {
        n,
        m,
        ratio: m as f64 / n as f64,
        bound: bound.to_string(),
    })
}

/// Exact power-of-two comparison used by tests and reports.
pub fn satisfies(m: u64, bound: &BigUint) -> bool {
    (BigUint::one() << m as usize) >= *bound
}

//! Permanent oracles, the permanent tensor and coefficient families whose
//! product expansions reproduce it.
//!
//! A family `{a_{i,k}^{(j)}}` with `perm(X) = Σ_j Π_i Σ_k a_{i,k}^{(j)} x_{i,k}`
//! is the same thing as a `k`-term product decomposition of the permanent
//! tensor `D(1,…,1)`, so its size is bounded below by any flattening rank.

mod family;

use std::ops::Neg;

use num_bigint::BigInt;
use num_traits::{Num, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use family::{
    check_family, family_to_tensor, family_terms, glynn_family, verify_lower_bound, CoeffFamily,
    FamilyCheck, LowerBoundReport,
};

use crate::error::{Error, Result};
use crate::states::{next_permutation, LocalSpace, MultiIndex, PureState};

pub const BRUTE_MAX: usize = 9;
pub const FORMULA_MAX: usize = 20;
pub const TENSOR_MAX: u32 = 7;

fn check_square<T>(x: &[Vec<T>], cap: usize) -> Result<usize> {
    let n = x.len();
    if n == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    if x.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    if n > cap {
        return Err(Error::cap("permanent size", n.to_string(), cap.to_string()));
    }
    Ok(n)
}

/// `Σ_σ Π_i x_{i,σ(i)}` over all `N!` permutations.
pub fn perm_brute<T: Num + Clone>(x: &[Vec<T>]) -> Result<T> {
    let n = check_square(x, BRUTE_MAX)?;
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut total = T::zero();
    loop {
        let term = sigma
            .iter()
            .enumerate()
            .fold(T::one(), |acc, (i, &s)| acc * x[i][s].clone());
        total = total + term;
        if !next_permutation(&mut sigma) {
            return Ok(total);
        }
    }
}

/// Ryser's formula `(-1)^N Σ_{S} (-1)^{|S|} Π_i Σ_{k∈S} x_{i,k}`, walked in
/// Gray-code order so each step updates the row sums by one column.
pub fn perm_ryser<T: Num + Clone + Neg<Output = T>>(x: &[Vec<T>]) -> Result<T> {
    let n = check_square(x, FORMULA_MAX)?;
    let mut sums = vec![T::zero(); n];
    let mut total = T::zero();
    let mut gray = 0u32;
    for step in 1u32..1 << n {
        let col = step.trailing_zeros() as usize;
        gray ^= 1 << col;
        let adding = gray >> col & 1 == 1;
        for (s, row) in sums.iter_mut().zip(x) {
            *s = if adding {
                s.clone() + row[col].clone()
            } else {
                s.clone() - row[col].clone()
            };
        }
        let prod = sums.iter().fold(T::one(), |acc, s| acc * s.clone());
        if (n as u32 - gray.count_ones()).is_multiple_of(2) {
            total = total + prod;
        } else {
            total = total - prod;
        }
    }
    Ok(total)
}

/// Glynn's formula `2^{1-N} Σ_{δ, δ_1=1} (Π_k δ_k) Π_i Σ_k δ_k x_{i,k}`.
pub fn perm_glynn<T: Num + Clone + Neg<Output = T>>(x: &[Vec<T>]) -> Result<T> {
    let n = check_square(x, FORMULA_MAX)?;
    // Start from δ = (1,…,1); bit k-1 of `flips` set means δ_k = -1.
    let mut sums: Vec<T> = x
        .iter()
        .map(|row| row.iter().fold(T::zero(), |a, v| a + v.clone()))
        .collect();
    let mut total = sums.iter().fold(T::one(), |acc, s| acc * s.clone());
    let mut flips = 0u32;
    for step in 1u32..1 << (n - 1) {
        let k = step.trailing_zeros() as usize + 1;
        flips ^= 1 << (k - 1);
        let now_negative = flips >> (k - 1) & 1 == 1;
        for (s, row) in sums.iter_mut().zip(x) {
            let twice = row[k].clone() + row[k].clone();
            *s = if now_negative {
                s.clone() - twice
            } else {
                s.clone() + twice
            };
        }
        let prod = sums.iter().fold(T::one(), |acc, s| acc * s.clone());
        if flips.count_ones().is_multiple_of(2) {
            total = total + prod;
        } else {
            total = total - prod;
        }
    }
    let scale = (0..n - 1).fold(T::one(), |a, _| a.clone() + a);
    Ok(total / scale)
}

/// `Σ_σ ⊗_i |σ(i)⟩` over symbols `1..N`; equal to `D(1,…,1)`.
pub fn permanent_tensor(parties: u32) -> Result<PureState<i64>> {
    if parties == 0 {
        return Err(Error::invalid("N must be >= 1"));
    }
    if parties > TENSOR_MAX {
        return Err(Error::cap("permanent tensor N", parties.to_string(), TENSOR_MAX.to_string()));
    }
    let mut sigma: Vec<u64> = (0..parties as u64).collect();
    let mut terms = Vec::new();
    loop {
        terms.push((MultiIndex(sigma.clone()), 1i64));
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    PureState::from_terms(vec![LocalSpace::symbols(parties, 1); parties as usize], terms)
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    #[serde(rename = "N")]
    pub size: usize,
    pub matrices: usize,
    pub seed: u64,
    pub entry_range: [i64; 2],
    pub agree: usize,
    /// First disagreeing matrix, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<Vec<Vec<i64>>>,
    pub pass: bool,
}

/// Compares brute force, Ryser and Glynn on `count` random integer
/// matrices with entries in `[-3, 3]`.
pub fn oracle_agreement(size: usize, count: usize, seed: u64) -> Result<OracleReport> {
    check_square(&vec![vec![(); size]; size], BRUTE_MAX)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    let mut mismatch = None;
    for _ in 0..count {
        let m: Vec<Vec<i64>> = (0..size)
            .map(|_| (0..size).map(|_| rng.random_range(-3..=3)).collect())
            .collect();
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| v.into()).collect()).collect();
        let b = perm_brute(&big)?;
        if perm_ryser(&big)? == b && perm_glynn(&big)? == b {
            agree += 1;
        } else if mismatch.is_none() {
            mismatch = Some(m);
        }
    }
    Ok(OracleReport {
        size,
        matrices: count,
        seed,
        entry_range: [-3, 3],
        agree,
        pass: mismatch.is_none(),
        mismatch,
    })
}

/// `2^{N-1} >= C(N, ⌊N/2⌋)`: the Glynn family never undercuts the bound.
pub fn glynn_size_respects_bound(parties: u32) -> bool {
    use crate::states::combinatorics::binomial;
    num_bigint::BigUint::one() << (parties as usize - 1)
        >= binomial(parties as u64, parties as u64 / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_dicke, DickeSpec, Limits};
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn ones(n: usize) -> Vec<Vec<i64>> {
        vec![vec![1; n]; n]
    }

    #[test]
    fn small_examples() {
        assert_eq!(perm_brute(&[vec![1i64]]).unwrap(), 1);
        assert_eq!(perm_brute(&ones(2)).unwrap(), 2);
        assert_eq!(perm_brute(&ones(3)).unwrap(), 6);
        assert_eq!(perm_ryser(&ones(3)).unwrap(), 6);
        assert_eq!(perm_glynn(&ones(3)).unwrap(), 6);
        let id: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|k| (i == k) as i64).collect()).collect();
        for f in [perm_brute::<i64>, perm_ryser::<i64>, perm_glynn::<i64>] {
            assert_eq!(f(&id).unwrap(), 1);
        }
        assert_eq!(perm_ryser(&[vec![5i64]]).unwrap(), 5);
        assert_eq!(perm_glynn(&[vec![5i64]]).unwrap(), 5);
    }

    #[test]
    fn all_ones_gives_factorial() {
        for n in 1..=8usize {
            let f: i64 = (1..=n as i64).product();
            assert_eq!(perm_ryser(&ones(n)).unwrap(), f);
            assert_eq!(perm_glynn(&ones(n)).unwrap(), f);
        }
        let big = vec![vec![1i128; 20]; 20];
        let f20: i128 = (1..=20).product();
        assert_eq!(perm_ryser(&big).unwrap(), f20);
    }

    #[test]
    fn guards() {
        assert!(perm_brute(&ones(10)).is_err());
        assert!(perm_ryser(&vec![vec![0i64; 21]; 21]).is_err());
        assert!(perm_brute::<i64>(&[]).is_err());
        assert!(perm_glynn(&[vec![1i64, 2]]).is_err());
        assert!(permanent_tensor(8).is_err());
    }

    #[test]
    fn oracles_agree_on_random_matrices() {
        for n in 1..=7 {
            let r = oracle_agreement(n, 50, 7 + n as u64).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.agree, 50);
        }
    }

    #[test]
    fn rational_entries() {
        let h = BigRational::new(1.into(), 2.into());
        let x = vec![vec![h.clone(), h.clone()], vec![h.clone(), -h.clone()]];
        // ½·(−½) + ½·½ = 0
        assert!(perm_brute(&x).unwrap().is_zero());
        assert!(perm_glynn(&x).unwrap().is_zero());
        assert!(perm_ryser(&x).unwrap().is_zero());
    }

    #[test]
    fn permanent_tensor_matches_dicke() {
        let t = permanent_tensor(2).unwrap();
        let labels: Vec<String> = t.support().map(|i| i.render(t.spaces())).collect();
        assert_eq!(labels, ["1,2", "2,1"]);
        assert_eq!(permanent_tensor(3).unwrap().len(), 6);
        assert!(!permanent_tensor(3).unwrap().contains(&MultiIndex(vec![0, 0, 1])));
        for n in 1..=6u32 {
            let d = build_dicke(&DickeSpec::new(vec![1; n as usize]).unwrap(), &Limits::default()).unwrap();
            assert_eq!(permanent_tensor(n).unwrap(), d);
        }
    }

    #[test]
    fn glynn_size_vs_bound() {
        for n in 1..=12 {
            assert!(glynn_size_respects_bound(n));
        }
    }

    proptest! {
        #[test]
        fn permanent_is_row_and_column_symmetric(
            m in prop::collection::vec(prop::collection::vec(-5i64..=5, 5), 5),
            p in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let permuted: Vec<Vec<i64>> = p.iter().map(|&i| m[i].clone()).collect();
            let transposed: Vec<Vec<i64>> = (0..5).map(|k| (0..5).map(|i| m[i][k]).collect()).collect();
            let v = perm_ryser(&m).unwrap();
            prop_assert_eq!(perm_glynn(&permuted).unwrap(), v);
            prop_assert_eq!(perm_brute(&transposed).unwrap(), v);
        }
    }
}

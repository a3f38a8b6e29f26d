use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::states::ExactAmplitude;

/// Exact rank of a rational matrix. Each row is cleared of denominators and
/// the integer matrix is reduced by fraction-free (Bareiss) elimination.
pub fn rank_exact<T: ExactAmplitude>(rows: &[Vec<T>]) -> usize {
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let rats: Vec<_> = row.iter().map(T::to_rational).collect();
            let lcm = rats
                .iter()
                .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            rats.iter()
                .map(|r| r.numer() * (&lcm / r.denom()))
                .collect()
        })
        .collect();
    rank_bareiss(ints)
}

/// Bareiss elimination with row pivoting and column skipping. Every division
/// is exact: each updated entry is a minor of the input.
pub fn rank_bareiss(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, rest) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let num = &row[j] * &prow[c] - &factor * &prow[j];
                debug_assert!((&num % &prev).is_zero(), "inexact Bareiss division");
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = prow[c].clone();
        rank += 1;
    }
    rank
}

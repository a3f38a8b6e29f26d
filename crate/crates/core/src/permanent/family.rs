use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{permanent_tensor, TENSOR_MAX};
use crate::error::{Error, Result};
use crate::rank::{flatten, rank_exact, Bipartition};
use crate::slocc::{expand_terms, LocalVector, ProductTerm};
use crate::states::combinatorics::binomial;
use crate::states::{render_ratio, Limits, LocalSpace, PureState};

pub const GLYNN_MAX: u32 = 12;
pub const LOWER_BOUND_MAX: u32 = 6;

/// `scale · Σ_j Π_i Σ_k a[j][i][k] x_{i,k}`. Each row form is linear with no
/// constant term, so the homogeneity requirement holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffFamily {
    size: usize,
    scale: BigRational,
    terms: Vec<Vec<Vec<BigRational>>>,
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    #[serde(rename = "N")]
    size: usize,
    #[serde(default = "one_string")]
    scale: String,
    terms: Vec<Vec<Vec<String>>>,
}

fn one_string() -> String {
    "1/1".into()
}

fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

impl CoeffFamily {
    pub fn new(size: usize, scale: BigRational, terms: Vec<Vec<Vec<BigRational>>>) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("N must be >= 1"));
        }
        if terms.is_empty() {
            return Err(Error::invalid("family needs at least one term"));
        }
        for (j, t) in terms.iter().enumerate() {
            if t.len() != size || t.iter().any(|row| row.len() != size) {
                return Err(Error::DimensionMismatch(format!(
                    "term {} is not {size}x{size}",
                    j + 1
                )));
            }
        }
        Ok(CoeffFamily { size, scale, terms })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn terms(&self) -> &[Vec<Vec<BigRational>>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the family on a matrix; equals `perm(x)` for a valid family.
    pub fn evaluate(&self, x: &[Vec<BigRational>]) -> Result<BigRational> {
        if x.len() != self.size || x.iter().any(|r| r.len() != self.size) {
            return Err(Error::DimensionMismatch("matrix size differs from family N".into()));
        }
        let mut total = BigRational::zero();
        for t in &self.terms {
            let mut prod = BigRational::one();
            for (coeffs, row) in t.iter().zip(x) {
                prod *= coeffs.iter().zip(row).map(|(a, v)| a * v).sum::<BigRational>();
            }
            total += prod;
        }
        Ok(total * &self.scale)
    }

    pub fn to_json(&self) -> String {
        let raw = RawFamily {
            size: self.size,
            scale: render_ratio(&self.scale),
            terms: self
                .terms
                .iter()
                .map(|t| t.iter().map(|r| r.iter().map(render_ratio).collect()).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("family serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawFamily = serde_json::from_str(s)?;
        let terms = raw
            .terms
            .iter()
            .map(|t| {
                t.iter()
                    .map(|r| r.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CoeffFamily::new(raw.size, parse_rational(&raw.scale)?, terms)
    }
}

/// Glynn's `2^{N-1}` terms: one per `δ ∈ {±1}^N` with `δ_1 = +1`, every row
/// form equal to `(δ_1,…,δ_N)`. The sign `Π δ_k` is folded into row 1 and
/// `2^{1-N}` is kept as the scale.
pub fn glynn_family(size: u32) -> Result<CoeffFamily> {
    if size == 0 {
        return Err(Error::invalid("N must be >= 1"));
    }
    if size > GLYNN_MAX {
        return Err(Error::cap("Glynn family N", size.to_string(), GLYNN_MAX.to_string()));
    }
    let n = size as usize;
    let mut terms = Vec::with_capacity(1 << (n - 1));
    for flips in 0u32..1 << (n - 1) {
        let delta: Vec<BigRational> = (0..n)
            .map(|k| {
                let neg = k > 0 && flips >> (k - 1) & 1 == 1;
                BigRational::from_integer(BigInt::from(if neg { -1 } else { 1 }))
            })
            .collect();
        let sign = BigRational::from_integer(BigInt::from(if flips.count_ones() % 2 == 0 { 1 } else { -1 }));
        let mut rows = vec![delta.clone(); n];
        rows[0] = delta.iter().map(|d| d * &sign).collect();
        terms.push(rows);
    }
    let scale = BigRational::new(BigInt::one(), BigInt::one() << (n - 1));
    CoeffFamily::new(n, scale, terms)
}

/// Product terms of the family over `N` parties with local space `{1..N}`;
/// the scale is applied to party 1.
pub fn family_terms(fam: &CoeffFamily) -> Result<Vec<ProductTerm<BigRational>>> {
    let space = LocalSpace::symbols(fam.size as u32, 1);
    fam.terms
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .map(|(i, row)| {
                    let v = LocalVector::from_entries(
                        space,
                        row.iter().enumerate().map(|(k, a)| (k as u64, a.clone())),
                    )?;
                    if i == 0 {
                        v.scaled(&fam.scale)
                    } else {
                        Ok(v)
                    }
                })
                .collect()
        })
        .collect()
}

/// `scale · Σ_j ⊗_i (Σ_k a[j][i][k] |k⟩)` as a sparse state.
pub fn family_to_tensor(fam: &CoeffFamily, limits: &Limits) -> Result<PureState<BigRational>> {
    let per_term = (fam.size as u128).checked_pow(fam.size as u32).unwrap_or(u128::MAX);
    limits.check_entries("family expansion", per_term)?;
    expand_terms(&family_terms(fam)?, limits)
}

fn middle_cut_rank<T: crate::states::ExactAmplitude>(state: &PureState<T>, limits: &Limits) -> Result<usize> {
    let cut = Bipartition::half(state.num_parties())?;
    Ok(rank_exact(&flatten(state, &cut)?.to_dense(limits)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    #[serde(rename = "N")]
    pub size: u32,
    pub r: u32,
    pub flattening_rank: usize,
    pub binomial: String,
    pub glynn_terms: String,
    /// Any family for this `N` needs at least `flattening_rank` terms.
    pub min_terms: usize,
    pub pass: bool,
}

/// Exact middle-cut flattening rank of the permanent tensor against
/// `C(N, ⌊N/2⌋)`.
pub fn verify_lower_bound(size: u32, limits: &Limits) -> Result<LowerBoundReport> {
    if size < 2 {
        return Err(Error::invalid("N must be >= 2 for a bipartition"));
    }
    if size > LOWER_BOUND_MAX {
        return Err(Error::cap("lower-bound N", size.to_string(), LOWER_BOUND_MAX.to_string()));
    }
    let t = permanent_tensor(size)?;
    let rank = middle_cut_rank(&t, limits)?;
    let c = binomial(size as u64, size as u64 / 2);
    Ok(LowerBoundReport {
        size,
        r: size / 2,
        flattening_rank: rank,
        binomial: c.to_string(),
        glynn_terms: (num_bigint::BigUint::one() << (size as usize - 1)).to_string(),
        min_terms: rank,
        pass: num_bigint::BigUint::from(rank) == c,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyCheck {
    #[serde(rename = "N")]
    pub size: usize,
    pub reconstructs_permanent: bool,
    pub terms: usize,
    pub lower_bound: String,
    pub satisfied: bool,
}

/// Expands the family, compares it with the permanent tensor and checks its
/// size against `C(N, ⌊N/2⌋)`.
pub fn check_family(fam: &CoeffFamily, limits: &Limits) -> Result<FamilyCheck> {
    if fam.size as u32 > TENSOR_MAX {
        return Err(Error::cap("family check N", fam.size.to_string(), TENSOR_MAX.to_string()));
    }
    let got = family_to_tensor(fam, limits)?;
    let want = permanent_tensor(fam.size as u32)?.map(|&v| BigRational::from_integer(v.into()));
    let reconstructs = got == want;
    let bound = binomial(fam.size as u64, fam.size as u64 / 2);
    Ok(FamilyCheck {
        size: fam.size,
        reconstructs_permanent: reconstructs,
        terms: fam.len(),
        lower_bound: bound.to_string(),
        satisfied: num_bigint::BigUint::from(fam.len()) >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permanent::perm_brute;
    use crate::slocc::slocc_witness_from_terms;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn delta_family_is_product_state() {
        let n = 3;
        let t: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|k| q((i == k) as i64)).collect()).collect();
        let fam = CoeffFamily::new(n, q(1), vec![t]).unwrap();
        let s = family_to_tensor(&fam, &Limits::default()).unwrap();
        let labels: Vec<String> = s.support().map(|i| i.render(s.spaces())).collect();
        assert_eq!(labels, ["1,2,3"]);
    }

    #[test]
    fn glynn_reconstructs_permanent_tensor() {
        let l = Limits::default();
        for n in 1..=5u32 {
            let fam = glynn_family(n).unwrap();
            assert_eq!(fam.len(), 1 << (n - 1));
            let c = check_family(&fam, &l).unwrap();
            assert!(c.reconstructs_permanent && c.satisfied, "{c:?}");
        }
        assert_eq!(glynn_family(4).unwrap().len(), 8);
        assert!(glynn_family(13).is_err());
        assert_eq!(glynn_family(12).unwrap().len(), 2048);
    }

    #[test]
    fn glynn_two_by_hand() {
        // ½[(|1⟩+|2⟩)(|1⟩+|2⟩) − (|1⟩−|2⟩)(|1⟩−|2⟩)] = |12⟩ + |21⟩
        let fam = glynn_family(2).unwrap();
        assert_eq!(fam.terms()[1], vec![vec![q(-1), q(1)], vec![q(1), q(-1)]]);
        assert_eq!(fam.scale(), &BigRational::new(1.into(), 2.into()));
        let s = family_to_tensor(&fam, &Limits::default()).unwrap();
        let entries: Vec<(String, BigRational)> =
            s.iter().map(|(i, v)| (i.render(s.spaces()), v.clone())).collect();
        assert_eq!(entries, [("1,2".to_string(), q(1)), ("2,1".to_string(), q(1))]);
    }

    #[test]
    fn family_evaluates_to_permanent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6usize {
            let fam = glynn_family(n as u32).unwrap();
            for _ in 0..5 {
                let x: Vec<Vec<BigRational>> =
                    (0..n).map(|_| (0..n).map(|_| q(rng.random_range(-4..=4))).collect()).collect();
                assert_eq!(fam.evaluate(&x).unwrap(), perm_brute(&x).unwrap());
            }
        }
    }

    #[test]
    fn lower_bound_values() {
        let l = Limits::default();
        for (n, want) in [(2, 2), (3, 3), (4, 6), (5, 10), (6, 20)] {
            let r = verify_lower_bound(n, &l).unwrap();
            assert!(r.pass);
            assert_eq!(r.flattening_rank, want);
        }
        assert!(verify_lower_bound(7, &l).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let fam = glynn_family(3).unwrap();
        let json = fam.to_json();
        assert!(json.contains("\"scale\": \"1/4\""));
        assert_eq!(CoeffFamily::from_json(&json).unwrap(), fam);
        let bad = r#"{"N": 2, "terms": [[["1/1","x"],["1","1"]]]}"#;
        assert!(matches!(CoeffFamily::from_json(bad), Err(Error::Parse(_))));
        let ragged = r#"{"N": 2, "terms": [[["1"],["1","1"]]]}"#;
        assert!(CoeffFamily::from_json(ragged).is_err());
    }

    #[test]
    fn undersized_family_is_flagged() {
        // One product term cannot reproduce the N=3 permanent.
        let fam = CoeffFamily::new(3, q(1), vec![vec![vec![q(1); 3]; 3]]).unwrap();
        let c = check_family(&fam, &Limits::default()).unwrap();
        assert!(!c.reconstructs_permanent && !c.satisfied);
    }

    #[test]
    fn glynn_three_as_ghz_witness() {
        let terms = family_terms(&glynn_family(3).unwrap()).unwrap();
        let w = slocc_witness_from_terms(&terms, &Limits::default()).unwrap();
        assert!(w.verified());
        assert_eq!(w.levels, 4);
        let target = permanent_tensor(3).unwrap().map(|&v| q(v));
        assert_eq!(expand_terms(&terms, &Limits::default()).unwrap(), target);
    }

    fn small_family() -> impl Strategy<Value = CoeffFamily> {
        (2usize..=4, 1usize..=4).prop_flat_map(|(n, k)| {
            prop::collection::vec(prop::collection::vec(prop::collection::vec(-2i64..=2, n), n), k)
                .prop_map(move |t| {
                    let terms = t
                        .into_iter()
                        .map(|m| m.into_iter().map(|r| r.into_iter().map(q).collect()).collect())
                        .collect();
                    CoeffFamily::new(n, q(1), terms).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn flattening_rank_at_most_term_count(fam in small_family()) {
            let l = Limits::default();
            let s = family_to_tensor(&fam, &l).unwrap();
            prop_assume!(!s.is_empty());
            for cut in Bipartition::all(fam.size()) {
                let r = rank_exact(&flatten(&s, &cut).unwrap().to_dense(&l).unwrap());
                prop_assert!(r <= fam.len());
            }
        }
    }
}

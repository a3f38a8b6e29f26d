use std::collections::BTreeMap;

use serde::Serialize;

use super::operator::{apply_local, LocalOperator};
use crate::error::{Error, Result};
use crate::report::Verification;
use crate::states::{ghz_unchecked, Accumulator, Amplitude, Limits, LocalSpace, MultiIndex, PureState};

/// Sparse vector in one party's local space.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalVector<T> {
    pub space: LocalSpace,
    pub entries: BTreeMap<u64, T>,
}

impl<T: Amplitude> LocalVector<T> {
    pub fn from_entries<I>(space: LocalSpace, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, T)>,
    {
        let mut map: BTreeMap<u64, T> = BTreeMap::new();
        for (i, v) in entries {
            if i >= space.dim() {
                return Err(Error::DimensionMismatch(format!("label {i} outside {space}")));
            }
            let new = match map.get(&i) {
                Some(old) => old.try_add(&v)?,
                None => v,
            };
            if new.is_zero() {
                map.remove(&i);
            } else {
                map.insert(i, new);
            }
        }
        Ok(LocalVector { space, entries: map })
    }

    pub fn scaled(&self, factor: &T) -> Result<Self> {
        LocalVector::from_entries(
            self.space,
            self.entries
                .iter()
                .map(|(&i, v)| v.try_mul(factor).map(|x| (i, x)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// `⊗_p v_p`, one local vector per party.
pub type ProductTerm<T> = Vec<LocalVector<T>>;

/// Expands `Σ_terms ⊗_p v_p` into a sparse state.
pub fn expand_terms<T: Amplitude>(terms: &[ProductTerm<T>], limits: &Limits) -> Result<PureState<T>> {
    let first = terms
        .first()
        .ok_or_else(|| Error::invalid("need at least one product term"))?;
    let spaces: Vec<LocalSpace> = first.iter().map(|v| v.space).collect();
    let mut acc = Accumulator::new(spaces.len());
    for term in terms {
        if term.len() != spaces.len() || term.iter().zip(&spaces).any(|(v, s)| v.space != *s) {
            return Err(Error::DimensionMismatch(
                "product terms disagree on party count or local spaces".into(),
            ));
        }
        let size: u128 = term.iter().map(|v| v.entries.len() as u128).product();
        limits.check_entries("product term expansion", size)?;
        let mut partial: Vec<(Vec<u64>, T)> = vec![(Vec::new(), T::one())];
        for v in term {
            let mut next = Vec::with_capacity(partial.len() * v.entries.len());
            for (k, a) in &partial {
                for (&i, b) in &v.entries {
                    let mut k = k.clone();
                    k.push(i);
                    next.push((k, a.try_mul(b)?));
                }
            }
            partial = next;
        }
        for (k, v) in partial {
            acc.add(MultiIndex(k), &v)?;
        }
        limits.check_entries("product term expansion", acc.len() as u128)?;
    }
    Ok(acc.into_state(spaces))
}

#[derive(Debug, Clone)]
pub struct Witness<T> {
    /// One operator per party; column `l` is that party's vector in term `l`.
    pub operators: Vec<LocalOperator<T>>,
    pub levels: u32,
    pub check: Verification,
}

impl<T> Witness<T> {
    pub fn verified(&self) -> bool {
        self.check.pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessSummary {
    pub levels: u32,
    pub parties: usize,
    pub operator_nnz: Vec<usize>,
    pub verified: bool,
}

impl<T: Amplitude> Witness<T> {
    pub fn summary(&self) -> WitnessSummary {
        WitnessSummary {
            levels: self.levels,
            parties: self.operators.len(),
            operator_nnz: self.operators.iter().map(LocalOperator::nnz).collect(),
            verified: self.check.pass,
        }
    }
}

/// Turns an R-term product decomposition into local operators that map the
/// R-level GHZ state `Σ_{l<R} |l…l⟩` onto `Σ terms`, and checks this by
/// applying them.
pub fn slocc_witness_from_terms<T: Amplitude>(
    terms: &[ProductTerm<T>],
    limits: &Limits,
) -> Result<Witness<T>> {
    let target = expand_terms(terms, limits)?;
    let levels = u32::try_from(terms.len()).map_err(|_| Error::invalid("too many terms"))?;
    let in_space = LocalSpace::levels(levels);
    let parties = target.num_parties();
    let mut operators: Vec<LocalOperator<T>> = target
        .spaces()
        .iter()
        .map(|&s| LocalOperator::new(s, in_space))
        .collect();
    for (l, term) in terms.iter().enumerate() {
        for (op, v) in operators.iter_mut().zip(term) {
            for (&i, a) in &v.entries {
                op.add(i, l as u64, a)?;
            }
        }
    }
    let ghz = ghz_unchecked::<T>(parties, levels);
    let produced = apply_local(&operators, &ghz, limits)?;
    let check = produced.compare(&target, 0.0)?;
    Ok(Witness {
        operators,
        levels,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slocc::{build_efg, lemma1_terms, ComponentLabel};
    use crate::states::build_ghz;

    fn basis(i: u64) -> LocalVector<i64> {
        LocalVector::from_entries(LocalSpace::bits(1), [(i, 1)]).unwrap()
    }

    #[test]
    fn ghz_terms_give_identity_embeddings() {
        let terms = vec![vec![basis(0); 3], vec![basis(1); 3]];
        let w = slocc_witness_from_terms(&terms, &Limits::default()).unwrap();
        assert!(w.verified());
        for op in &w.operators {
            let e: Vec<_> = op.iter().map(|(&k, &v)| (k, v)).collect();
            assert_eq!(e, [((0, 0), 1), ((1, 1), 1)]);
        }
        assert_eq!(expand_terms(&terms, &Limits::default()).unwrap(), build_ghz(3, 2).unwrap());
    }

    #[test]
    fn lemma1_terms_rebuild_efg() {
        let label = ComponentLabel::new(vec![1, 0, 0], 1).unwrap();
        let terms = lemma1_terms(1, &label).unwrap();
        let w = slocc_witness_from_terms(&terms, &Limits::default()).unwrap();
        assert!(w.verified());
        let efg = build_efg(1, &label, &Limits::default()).unwrap();
        for (a, b) in w.operators.iter().zip(&efg) {
            let a: Vec<_> = a.iter().collect();
            let b: Vec<_> = b.iter().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mismatched_terms_rejected() {
        let terms = vec![vec![basis(0); 3], vec![basis(1); 2]];
        assert!(slocc_witness_from_terms(&terms, &Limits::default()).is_err());
        assert!(slocc_witness_from_terms::<i64>(&[], &Limits::default()).is_err());
    }
}

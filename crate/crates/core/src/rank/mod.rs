//! Flattening ranks, 2×2×2 classification and rank/rate bounds.

mod bounds;
mod exact;
mod flatten;
mod hyperdet;
mod numeric;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

pub use bounds::{
    copies_bound, copies_needed, dicke_split_count, rate_lower_bound, satisfies, sorting_map,
    sorting_map_on, verify_tight_bound, w_power_rank_lower, CopiesRow, RateBound, RateTarget,
    TightBoundReport,
};
pub use exact::{rank_bareiss, rank_exact};
pub use flatten::{flatten, group_parties, Bipartition, Flattening};
pub use hyperdet::{
    bounded_rank_fit, classify_222, hyperdeterminant_222, Class222, FitReport, DEFAULT_FACTOR_CAP,
};
pub use numeric::{rank_numeric, DEFAULT_REL_TOL};

use crate::error::Result;
use crate::states::{Amplitude, ExactAmplitude, Limits, PureState};

#[derive(Debug, Clone, Serialize)]
pub struct Bound {
    pub name: String,
    pub value: String,
    /// `lower` or `exact`.
    pub kind: &'static str,
    /// The argument the value rests on.
    pub citation: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    /// Rank of each flattening, keyed by the rendered cut.
    pub flattening_ranks: BTreeMap<String, usize>,
    /// Largest flattening rank: a lower bound on tensor rank.
    pub max_flattening: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_222: Option<Class222>,
    pub bounds: Vec<Bound>,
}

fn is_222<T: Amplitude>(state: &PureState<T>) -> bool {
    state.local_dims() == [2, 2, 2]
}

fn assemble(flattening_ranks: BTreeMap<String, usize>, class_222: Option<Class222>) -> RankReport {
    let max_flattening = flattening_ranks.values().copied().max().unwrap_or(0);
    let mut bounds = vec![Bound {
        name: "rank >= max flattening rank".into(),
        value: max_flattening.to_string(),
        kind: "lower",
        citation: "a sum of k product terms has rank <= k across every cut",
    }];
    if let Some(c) = &class_222 {
        bounds.push(Bound {
            name: "rank of 2x2x2 tensor".into(),
            value: c.rank.to_string(),
            kind: "exact",
            citation: "Cayley hyperdeterminant with single-party flattening ranks",
        });
    }
    RankReport {
        flattening_ranks,
        max_flattening,
        class_222,
        bounds,
    }
}

/// Exact ranks of the given cuts (every cut when `cuts` is empty).
pub fn rank_report_exact<T: ExactAmplitude>(
    state: &PureState<T>,
    cuts: &[Bipartition],
    limits: &Limits,
) -> Result<RankReport> {
    let all;
    let cuts = if cuts.is_empty() {
        all = Bipartition::all(state.num_parties());
        &all[..]
    } else {
        cuts
    };
    let mut ranks = BTreeMap::new();
    for cut in cuts {
        let f = flatten(state, cut)?;
        ranks.insert(cut.to_string(), rank_exact(&f.to_dense(limits)?));
    }
    let class = if is_222(state) {
        Some(classify_222(state, limits)?)
    } else {
        None
    };
    Ok(assemble(ranks, class))
}

/// Numeric counterpart of [`rank_report_exact`] via SVD.
pub fn rank_report_numeric(
    state: &PureState<Complex64>,
    cuts: &[Bipartition],
    rel_tol: f64,
    limits: &Limits,
) -> Result<RankReport> {
    let all;
    let cuts = if cuts.is_empty() {
        all = Bipartition::all(state.num_parties());
        &all[..]
    } else {
        cuts
    };
    let mut ranks = BTreeMap::new();
    for cut in cuts {
        let f = flatten(state, cut)?;
        ranks.insert(cut.to_string(), rank_numeric(&f.to_dense(limits)?, rel_tol));
    }
    Ok(assemble(ranks, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_dicke, build_ghz, build_w, DickeSpec, LocalSpace, MultiIndex};
    use proptest::prelude::*;

    #[test]
    fn report_for_w_and_ghz() {
        let l = Limits::default();
        let w = rank_report_exact(&build_w(3).unwrap(), &[], &l).unwrap();
        assert_eq!(w.flattening_ranks.len(), 3);
        assert_eq!(w.max_flattening, 2);
        assert_eq!(w.class_222.unwrap().rank, 3);
        let g = build_ghz(4, 3).unwrap();
        let r = rank_report_exact(&g, &[], &l).unwrap();
        assert_eq!(r.flattening_ranks.len(), 7);
        assert!(r.flattening_ranks.values().all(|&v| v == 3));
        assert!(r.class_222.is_none());
        let n = rank_report_numeric(&g.map(|&v| Complex64::new(v as f64, 0.0)), &[], DEFAULT_REL_TOL, &l).unwrap();
        assert_eq!(n.flattening_ranks, r.flattening_ranks);
    }

    fn two_party(m: &[Vec<i64>]) -> PureState<i64> {
        let d = m.len() as u32;
        let terms = m.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(k, &v)| (MultiIndex(vec![i as u64, k as u64]), v))
        });
        PureState::from_terms(vec![LocalSpace::levels(d); 2], terms).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn bipartite_rank_is_multiplicative(
            m in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 3),
            k in 1u32..=3,
        ) {
            let l = Limits::default();
            let s = two_party(&m);
            prop_assume!(!s.is_empty());
            let cut = Bipartition::new(vec![0], 2).unwrap();
            let r = rank_exact(&flatten(&s, &cut).unwrap().to_dense(&l).unwrap());
            let p = s.tensor_power(k, &l).unwrap();
            let rk = rank_exact(&flatten(&p, &cut).unwrap().to_dense(&l).unwrap());
            prop_assert_eq!(rk, r.pow(k));
        }
    }

    #[test]
    fn dicke_power_middle_cut_ranks() {
        // Observed, not a claimed theorem: Π_{i>=2}(j_i+1)^n on these cases.
        let l = Limits::default();
        for (j, base) in [(vec![2, 1], 2usize), (vec![2, 2], 3), (vec![2, 1, 1], 4)] {
            let spec = DickeSpec::new(j).unwrap();
            let d = build_dicke(&spec, &l).unwrap();
            for n in 1..=2u32 {
                let p = d.tensor_power(n, &l).unwrap();
                let cut = Bipartition::half(p.num_parties()).unwrap();
                let r = rank_exact(&flatten(&p, &cut).unwrap().to_dense(&l).unwrap());
                assert_eq!(r, base.pow(n));
            }
        }
    }

    #[test]
    fn epr_flattening_rank_is_multiplicative() {
        let l = Limits::default();
        let epr = build_ghz(2, 2).unwrap();
        for m in 1..=5u32 {
            let s = epr.tensor_power(m, &l).unwrap();
            let f = flatten(&s, &Bipartition::new(vec![0], 2).unwrap()).unwrap();
            assert_eq!(rank_exact(&f.to_dense(&l).unwrap()), 1 << m);
        }
    }
}

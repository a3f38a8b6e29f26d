use serde::Serialize;

use super::component::{build_component_w, check_copies, ComponentLabel};
use super::operator::{apply_local, LocalOperator};
use super::witness::{LocalVector, ProductTerm};
use crate::error::{Error, Result};
use crate::report::Verification;
use crate::states::{build_ghz, hamming_set, BitString, Limits, LocalSpace, PureState};

/// Whether party `p` of `parties` uses the complemented string `ī` in its
/// phase `(-1)^{l·ī}` (otherwise `(-1)^{l·i}`).
///
/// The sum over `l` survives only where the XOR of the chosen strings is zero.
/// Complementing an odd number of parties turns that into
/// `i ⊕ j ⊕ … = 1^n`. For odd N every party is complemented, as in the
/// three-party construction; for even N the last party is left plain.
pub fn uses_complement(p: usize, parties: usize) -> bool {
    parties % 2 == 1 || p + 1 < parties
}

fn phase(l: &BitString, i: &BitString, complemented: bool) -> i64 {
    let s = if complemented { i.complement() } else { *i };
    if l.dot(&s) == 1 {
        -1
    } else {
        1
    }
}

/// The ±1 operators `E, F, G, …` for a W component: party `p`'s operator is
/// `Σ_l Σ_{i ∈ A(parts[p])} (-1)^{l·ī} |i⟩⟨l|`, a `2^n × 2^n` matrix with
/// `C(n, parts[p]) · 2^n` nonzero entries.
pub fn build_efg(n: u32, label: &ComponentLabel, limits: &Limits) -> Result<Vec<LocalOperator<i64>>> {
    check_copies(n)?;
    if label.n() != n {
        return Err(Error::invalid(format!("label {label} does not match n = {n}")));
    }
    let space = LocalSpace::bits(n);
    let parties = label.parties();
    let ls: Vec<BitString> = (0..1u64 << n)
        .map(|l| BitString::new(l, n))
        .collect::<Result<_>>()?;
    label
        .parts()
        .iter()
        .enumerate()
        .map(|(p, &w)| {
            let rows = hamming_set(w, n)?;
            limits.check_entries("local operator", rows.len() as u128 * ls.len() as u128)?;
            let comp = uses_complement(p, parties);
            let mut op = LocalOperator::new(space, space);
            for i in &rows {
                for l in &ls {
                    op.set(i.value(), l.value(), phase(l, i, comp));
                }
            }
            Ok(op)
        })
        .collect()
}

/// `GHZ_N^{⊗n}` as `Σ_l |l⟩…|l⟩` with each party holding an n-bit string.
pub fn ghz_copies(parties: u32, n: u32, limits: &Limits) -> Result<PureState<i64>> {
    check_copies(n)?;
    build_ghz(parties, 2)?.tensor_power(n, limits)
}

/// Applies `ops` to `GHZ_N^{⊗n}` and compares with `2^n |[label]⟩_n`.
pub fn verify_component_witness(
    n: u32,
    label: &ComponentLabel,
    ops: &[LocalOperator<i64>],
    limits: &Limits,
) -> Result<Verification> {
    let source = ghz_copies(label.parties() as u32, n, limits)?;
    let produced = apply_local(ops, &source, limits)?;
    let expected = build_component_w(n, label, limits)?.scaled(&(1i64 << n))?;
    produced.compare(&expected, 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Report {
    pub n: u32,
    pub label: Vec<u32>,
    pub operator_nnz: Vec<usize>,
    #[serde(flatten)]
    pub check: Verification,
}

/// `(E ⊗ F ⊗ G) Σ_l |lll⟩ = 2^n |[a,b,c]⟩_n`, checked in exact integers.
pub fn verify_lemma1(n: u32, label: &ComponentLabel, limits: &Limits) -> Result<Lemma1Report> {
    let ops = build_efg(n, label, limits)?;
    let check = verify_component_witness(n, label, &ops, limits)?;
    Ok(Lemma1Report {
        n,
        label: label.parts().to_vec(),
        operator_nnz: ops.iter().map(LocalOperator::nnz).collect(),
        check,
    })
}

/// The `2^n` product terms `⊗_p Σ_{i ∈ A(parts[p])} (-1)^{l·ī} |i⟩`, one per
/// `l`, whose sum is `2^n |[label]⟩_n`.
pub fn lemma1_terms(n: u32, label: &ComponentLabel) -> Result<Vec<ProductTerm<i64>>> {
    check_copies(n)?;
    let space = LocalSpace::bits(n);
    let parties = label.parties();
    let sets = label
        .parts()
        .iter()
        .map(|&w| hamming_set(w, n))
        .collect::<Result<Vec<_>>>()?;
    (0..1u64 << n)
        .map(|l| {
            let l = BitString::new(l, n)?;
            sets.iter()
                .enumerate()
                .map(|(p, set)| {
                    LocalVector::from_entries(
                        space,
                        set.iter()
                            .map(|i| (i.value(), phase(&l, i, uses_complement(p, parties)))),
                    )
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(parts: &[u32]) -> ComponentLabel {
        ComponentLabel::new(parts.to_vec(), parts.iter().sum()).unwrap()
    }

    #[test]
    fn single_copy_operators_expand_by_hand() {
        let ops = build_efg(1, &label(&[1, 0, 0]), &Limits::default()).unwrap();
        // E = |1⟩⟨0| + |1⟩⟨1|
        let e: Vec<_> = ops[0].iter().map(|(&k, &v)| (k, v)).collect();
        assert_eq!(e, [((1, 0), 1), ((1, 1), 1)]);
        // F = |0⟩⟨0| − |0⟩⟨1|
        let f: Vec<_> = ops[1].iter().map(|(&k, &v)| (k, v)).collect();
        assert_eq!(f, [((0, 0), 1), ((0, 1), -1)]);
    }

    #[test]
    fn operator_nnz_counts() {
        let ops = build_efg(2, &label(&[1, 1, 0]), &Limits::default()).unwrap();
        assert_eq!(ops[0].nnz(), 8);
        assert!(ops.iter().all(|op| op.iter().all(|(_, v)| v.abs() == 1)));
        let ops = build_efg(4, &label(&[2, 1, 1]), &Limits::default()).unwrap();
        assert_eq!(ops.iter().map(LocalOperator::nnz).collect::<Vec<_>>(), [96, 64, 64]);
    }

    #[test]
    fn lemma1_single_copy() {
        let r = verify_lemma1(1, &label(&[1, 0, 0]), &Limits::default()).unwrap();
        assert!(r.check.pass);
        let src = ghz_copies(3, 1, &Limits::default()).unwrap();
        let ops = build_efg(1, &label(&[1, 0, 0]), &Limits::default()).unwrap();
        let out = apply_local(&ops, &src, &Limits::default()).unwrap();
        let entries: Vec<_> = out.iter().map(|(k, &v)| (k.render(out.spaces()), v)).collect();
        assert_eq!(entries, [("1,0,0".to_string(), 2)]);
    }

    #[test]
    fn lemma1_two_copies_all_labels() {
        for l in ComponentLabel::all(2, 3) {
            assert!(verify_lemma1(2, &l, &Limits::default()).unwrap().check.pass, "{l}");
        }
    }

    #[test]
    fn lemma1_other_party_counts() {
        for parties in [2, 4] {
            for l in ComponentLabel::all(3, parties) {
                assert!(verify_lemma1(3, &l, &Limits::default()).unwrap().check.pass, "{l}");
            }
        }
    }

    #[test]
    fn all_complemented_fails_for_even_parties() {
        // Complementing every party of an even-party W component selects
        // XOR = 0 instead of 1^n, so the construction has to differ there.
        let l = label(&[1, 0]);
        let mut ops = build_efg(1, &l, &Limits::default()).unwrap();
        let flipped = LocalOperator::from_entries(
            LocalSpace::bits(1),
            LocalSpace::bits(1),
            [((0, 0), 1i64), ((0, 1), -1)],
        )
        .unwrap();
        ops[1] = flipped;
        assert!(!verify_component_witness(1, &l, &ops, &Limits::default()).unwrap().pass);
    }

    #[test]
    fn corrupted_sign_fails_with_residual_two() {
        let l = label(&[1, 0, 0]);
        let mut ops = build_efg(1, &l, &Limits::default()).unwrap();
        let v = *ops[0].get(1, 0).unwrap();
        ops[0].set(1, 0, -v);
        let r = verify_component_witness(1, &l, &ops, &Limits::default()).unwrap();
        assert!(!r.pass);
        assert_eq!(r.max_residual, 2.0);
        assert!(r.first_mismatch.is_some());
    }
}

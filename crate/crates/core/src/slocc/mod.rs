//! W tensor-power components and the local operators that produce them from
//! GHZ copies.
//!
//! `W_N^{⊗n}` splits into the components `|[a,b,c,…]⟩_n`, one per
//! distribution of the `n` excitations over the parties. Each component is
//! the image of `GHZ_N^{⊗n}` under a product of ±1 matrices, so `n` copies
//! of W are a sum of polynomially many states each reachable from `n` GHZ
//! copies.

mod component;
mod lemma;
mod operator;
mod witness;

pub use component::{
    build_component_w, decompose_w_power, verify_w_decomposition, ComponentLabel, DecompositionReport,
};
pub use lemma::{
    build_efg, ghz_copies, lemma1_terms, uses_complement, verify_component_witness, verify_lemma1,
    Lemma1Report,
};
pub use operator::{apply_local, LocalOperator};
pub use witness::{
    expand_terms, slocc_witness_from_terms, LocalVector, ProductTerm, Witness, WitnessSummary,
};

//! Sparse unnormalized states and the combinatorics every other module uses.
//!
//! All states are unnormalized: GHZ is `Σ_l |l…l⟩`, W is the plain sum of the
//! weight-one strings and a Dicke state carries coefficient 1 on each
//! arrangement. SLOCC statements are scale-invariant, so nothing downstream
//! needs the normalization factors.

mod amplitude;
mod bits;
mod build;
pub mod combinatorics;
pub mod dump;
mod space;
mod state;

pub use amplitude::{Amplitude, Backend, ExactAmplitude};
pub use bits::{hamming_set, BitString, MAX_BITS};
pub use build::{build_dicke, build_ghz, build_w, characteristic_vector, DickeSpec};
pub use dump::{parse_state, write_state, AnyState};
pub use space::LocalSpace;
pub use state::{Limits, MultiIndex, PureState};

pub(crate) use amplitude::render_ratio;
pub(crate) use bits::WeightIter;
pub(crate) use build::{ghz_unchecked, next_permutation};
pub(crate) use state::Accumulator;

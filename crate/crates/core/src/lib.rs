//! Constructive, exact-arithmetic certificates for SLOCC conversions from GHZ
//! states to W and Dicke states.
//!
//! The crate is organised bottom-up:
//!
//! * [`states`]: sparse unnormalized tensors, bitstring and word combinatorics,
//!   and the GHZ / W / Dicke constructors.
//! * [`slocc`]: Hamming-weight components of `W^{⊗n}`, the ±1 local operators
//!   that produce each component from GHZ copies, and generic witnesses built
//!   from product decompositions.
//! * [`dicke`]: the characteristic-vector partition of `D^{⊗n}` and the
//!   root-of-unity identity behind it.
//! * [`rank`]: flattenings, exact and numeric matrix rank, the 2×2×2
//!   classifier, and the copy-count / rate calculators.
//! * [`permanent`]: permanent oracles, the permanent tensor and row-wise
//!   linear-form families.
//! * [`cli`]: the `slocc` command-line surface.

pub mod cli;
pub mod dicke;
pub mod error;
pub mod permanent;
pub mod rank;
pub mod report;
pub mod slocc;
pub mod states;

pub use error::{Error, Result};
pub use states::{Limits, PureState};

//! Verification outcome shared by the identity checkers.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub pass: bool,
    /// Largest absolute difference between the two sides, over the union of
    /// their supports.
    pub max_residual: f64,
    /// Rendered multi-index of the first (canonical order) entry where the two
    /// sides differ, if any.
    pub first_mismatch: Option<String>,
    /// Number of entries compared.
    pub entries_compared: usize,
}

impl Verification {
    pub fn passed(entries_compared: usize) -> Self {
        Verification {
            pass: true,
            max_residual: 0.0,
            first_mismatch: None,
            entries_compared,
        }
    }
}

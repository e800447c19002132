use serde::{Deserialize, Serialize};

use crate::special::INT_TOL;

/// Shared numerical settings for series evaluation and case detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Relative stopping tolerance for series.
    pub tol: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// A value counts as the integer n when |z - n| <= int_tol.
    pub int_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { tol: 1e-16, max_terms: 10_000, int_tol: INT_TOL }
    }
}

impl EvalConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn with_int_tol(mut self, int_tol: f64) -> Self {
        self.int_tol = int_tol;
        self
    }
}

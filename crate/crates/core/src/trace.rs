use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

/// One solution update of a greedy loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Root of the appended subtree.
    pub root: Vertex,
    /// Size guess `c_i` (recursive greedy only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub size_guess: Option<usize>,
    /// Marginal gain of the selected subtree to the partial solution.
    pub gain: f64,
    /// Remaining budget `b_i` after the update (recursive greedy only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub remaining: Option<usize>,
    /// Size-guess window `[c_min, c_max]` (recursive greedy only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<(usize, usize)>,
}

/// Execution record of a top-level solver call. Nested calls are not traced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgoTrace {
    pub iterations: Vec<IterationRecord>,
    /// Recursion level of the top-level call (recursive greedy only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<u32>,
    /// Subroutine invocations (radius greedy only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subroutine_calls: Option<u64>,
    pub oracle_queries: u64,
    /// True when the loop ended early on a zero best gain.
    pub stopped_early: bool,
}

impl AlgoTrace {
    /// Number of solution updates `t`.
    pub fn updates(&self) -> usize {
        self.iterations.len()
    }
}

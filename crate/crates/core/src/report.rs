//! Machine-readable solver output.

use serde::{Deserialize, Serialize};

use crate::graph::{OutTree, Vertex};
use crate::instance::{emit_json, emit_value};
use crate::reductions::GuessRecord;
use crate::trace::AlgoTrace;

pub const WALL_TIME_FIELD: &str = "wall_time_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// Size divisor of the recursive greedy, `k^{1/d}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subroutine: Option<String>,
    pub faithful: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionTree {
    pub root: Vertex,
    pub vertices: Vec<Vertex>,
    /// `(parent, child)` pairs; for undirected problems read them unoriented.
    pub edges: Vec<[Vertex; 2]>,
}

impl From<&OutTree> for SolutionTree {
    fn from(t: &OutTree) -> Self {
        Self { root: t.root(), vertices: t.vertices(), edges: t.edges().map(|(p, c)| [p, c]).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// `m <= k`.
    pub within_k: bool,
    /// `m <= (1 + δ)k`, for the bicriteria solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_violation: Option<bool>,
    /// Size limit the algorithm promises.
    pub size_limit: f64,
    /// `m <= size_limit`.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub total: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_guess: Vec<GuessRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFields {
    pub opt: f64,
    /// Height (directed) or radius (undirected) of the reported optimum.
    pub r_star: usize,
    /// `value / opt`; 1 when both are zero.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// Guaranteed lower bound on `value / opt`.
    pub value_factor: f64,
    /// The same guarantee written in `ε = 1/d`, when it applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_factor: Option<f64>,
    /// Radius plugged into radius-dependent factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_used: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub params: ReportParams,
    pub solution: SolutionTree,
    pub value: f64,
    pub size: usize,
    pub feasibility: Feasibility,
    pub oracle_queries: QueryCounts,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<AlgoTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactFields>,
    pub bounds: Bounds,
}

pub fn emit_report(report: &SolveReport) -> Vec<u8> {
    emit_json(report)
}

/// Canonical report bytes without the wall-clock field.
pub fn emit_report_deterministic(report: &SolveReport) -> Vec<u8> {
    let mut tree = serde_json::to_value(report).expect("plain data serializes");
    if let Some(obj) = tree.as_object_mut() {
        obj.remove(WALL_TIME_FIELD);
    }
    emit_value(&tree)
}

/// Output of the `exact` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    /// `"drcsm"`, `"dcsm"` or `"csm"`.
    pub problem: String,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_cap: Option<usize>,
    pub solution: SolutionTree,
    pub value: f64,
    pub size: usize,
    /// Height of the tree (directed) or radius of the set (undirected).
    pub r_star: usize,
    pub enumerated: u64,
    pub wall_time_ms: f64,
}

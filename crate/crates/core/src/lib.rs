//! Connected submodular maximization over directed and undirected graphs.
//!
//! The objective is a monotone submodular function of the vertex set and
//! solutions are connected trees with at most `k` edges. The crate provides
//! the radius-sensitive greedy ([`greedy_radius`](greedy_radius::greedy_radius)),
//! the recursive density greedy ([`rec_approx_d`](recapprox::rec_approx_d)),
//! feasible and bicriteria reductions built on them, tree partitioning, and a
//! brute-force exact solver for checking bounds on small instances.

pub mod driver;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod greedy_radius;
pub mod instance;
pub mod oracle;
pub mod partition;
pub mod recapprox;
pub mod reductions;
pub mod report;
pub mod trace;

pub use driver::{run_exact, run_solve, Algorithm, BenchRow, RunOptions};
pub use error::{Error, Result};
pub use exact::{EnumerationCap, ExactResult};
pub use generate::{gen_random, GenSpec, GraphModel, ObjectiveSpec};
pub use graph::{Bfs, Digraph, OutTree, UndirectedTree, Vertex};
pub use greedy_radius::{ExactSubroutine, GreedyOptions, Guarantee, RecApproxD, Subroutine};
pub use instance::{emit_instance, parse_instance, Instance, InstanceError, Objective};
pub use oracle::{
    verify_oracle, AdditiveFunction, CoverageFunction, OracleReport, Residual, SetFunction, TableFunction,
    ValueOracle,
};
pub use partition::Partition;
pub use recapprox::{RecOptions, RecParams, SizeDivisor};
pub use reductions::{Outcome, SolveParams, SubroutineKind};
pub use report::{emit_report, emit_report_deterministic, ExactReport, SolveReport};
pub use trace::{AlgoTrace, IterationRecord};

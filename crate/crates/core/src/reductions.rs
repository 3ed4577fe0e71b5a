//! Guessing wrappers that turn the radius greedy into solvers for the three
//! problem variants.
//!
//! * [`solve_dcsm`]: best feasible out-tree (`m <= k`) over every root and
//!   radius guess; oversized greedy outputs are cut with
//!   [`partition_by_size`] at `s = k/2` and the best part is kept.
//! * [`solve_csm`]: the undirected problem through bidirection, with radius
//!   guesses limited to `⌈k/2⌉`.
//! * [`solve_drcsm_bicriteria`]: rooted variant allowing `(1 + δ)k` edges;
//!   the best part at `s = δk/2` is reconnected to the root by a shortest path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::EnumerationCap;
use crate::graph::{Digraph, OutTree, Vertex};
use crate::greedy_radius::{greedy_radius, ExactSubroutine, GreedyOptions, RecApproxD, Subroutine};
use crate::oracle::Residual;
use crate::partition::{best_part, partition_by_size};
use crate::recapprox::{check_ground, RecOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubroutineKind {
    RecapproxD,
    Exact,
}

impl SubroutineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RecapproxD => "recapprox-d",
            Self::Exact => "exact",
        }
    }
}

/// Run configuration shared by the reductions.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveParams {
    /// Recursion depth of the recursive-greedy subroutine.
    pub d: u32,
    /// Violation budget for the bicriteria solver.
    pub delta: Option<f64>,
    /// Fixed root; all roots are tried when absent.
    pub root: Option<Vertex>,
    /// Fixed radius guess; the full range is tried when absent.
    pub radius: Option<usize>,
    pub subroutine: SubroutineKind,
    /// Disable every early stop.
    pub faithful: bool,
    pub lazy: bool,
    pub cap: EnumerationCap,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            d: 1,
            delta: None,
            root: None,
            radius: None,
            subroutine: SubroutineKind::RecapproxD,
            faithful: false,
            lazy: false,
            cap: EnumerationCap::default(),
        }
    }
}

impl SolveParams {
    pub fn validate(&self, k: usize) -> Result<()> {
        if k < 1 {
            return Err(Error::Parameter("size constraint k must be at least 1".into()));
        }
        if self.d < 1 {
            return Err(Error::Parameter("recursion depth d must be at least 1".into()));
        }
        if let Some(r) = self.radius {
            if r < 1 || r > k {
                return Err(Error::Parameter(format!("radius r = {r} must lie in [1, k = {k}]")));
            }
        }
        Ok(())
    }

    pub fn subroutine(&self) -> Box<dyn Subroutine> {
        match self.subroutine {
            SubroutineKind::Exact => Box::new(ExactSubroutine { cap: self.cap }),
            SubroutineKind::RecapproxD => {
                let options = if self.faithful { RecOptions::faithful() } else { RecOptions::default() };
                Box::new(RecApproxD { depth: self.d, options })
            }
        }
    }

    fn greedy_options(&self) -> GreedyOptions {
        GreedyOptions { early_stop: !self.faithful, lazy: self.lazy }
    }
}

/// One `(root, radius)` guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessRecord {
    pub root: Vertex,
    pub radius: usize,
    /// Edge count of the greedy output before extraction.
    pub greedy_size: usize,
    pub value: f64,
    pub size: usize,
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub tree: OutTree,
    pub value: f64,
    /// Index into `guesses` of the returned solution.
    pub best_guess: usize,
    pub guesses: Vec<GuessRecord>,
    pub total_queries: u64,
}

impl Outcome {
    pub fn best(&self) -> &GuessRecord {
        &self.guesses[self.best_guess]
    }
}

/// Keeps the most valuable candidate; earlier guesses win ties.
fn select(
    guesses: Vec<(GuessRecord, OutTree)>,
    start: u64,
    oracle: &Residual<'_>,
) -> Result<Outcome> {
    let mut best: Option<usize> = None;
    for (i, (g, _)) in guesses.iter().enumerate() {
        if best.map_or(true, |b| g.value > guesses[b].0.value) {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| Error::Parameter("no guesses to run".into()))?;
    let (records, mut trees): (Vec<GuessRecord>, Vec<OutTree>) = guesses.into_iter().unzip();
    Ok(Outcome {
        tree: trees.swap_remove(best),
        value: records[best].value,
        best_guess: best,
        guesses: records,
        total_queries: oracle.query_count() - start,
    })
}

/// Cuts `s` down to at most `k` edges: `s` itself if it already fits,
/// otherwise the best part of its partition at `s = k/2`.
fn feasible_part(s: &OutTree, k: usize, oracle: &Residual<'_>) -> Result<OutTree> {
    if s.size() <= k {
        return Ok(s.clone());
    }
    let p = partition_by_size(s, k as f64 / 2.0)?;
    let (i, _) = best_part(&p, oracle)?;
    Ok(p.parts[i].clone())
}

fn run_guesses(
    g: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    roots: &[Vertex],
    radii: &[usize],
    params: &SolveParams,
) -> Result<Outcome> {
    let start = oracle.query_count();
    let sub = params.subroutine();
    let mut guesses = Vec::new();
    for &v in roots {
        for &r in radii {
            let before = oracle.query_count();
            let (s, _) = greedy_radius(g, oracle, k, v, r, sub.as_ref(), params.greedy_options())?;
            let part = feasible_part(&s, k, oracle)?;
            let value = oracle.value(&part.vertices())?;
            let record = GuessRecord {
                root: v,
                radius: r,
                greedy_size: s.size(),
                value,
                size: part.size(),
                queries: oracle.query_count() - before,
            };
            guesses.push((record, part));
        }
    }
    select(guesses, start, oracle)
}

fn roots_of(g: &Digraph, params: &SolveParams) -> Result<Vec<Vertex>> {
    match params.root {
        Some(v) => {
            g.check_vertex(v)?;
            Ok(vec![v])
        }
        None => Ok((0..g.n()).collect()),
    }
}

fn radii_of(params: &SolveParams, max: usize) -> Vec<usize> {
    match params.radius {
        Some(r) => vec![r],
        None => (1..=max).collect(),
    }
}

/// Feasible directed solution with at most `k` edges.
pub fn solve_dcsm(g: &Digraph, oracle: &Residual<'_>, k: usize, params: &SolveParams) -> Result<Outcome> {
    params.validate(k)?;
    check_ground(g, oracle)?;
    run_guesses(g, oracle, k, &roots_of(g, params)?, &radii_of(params, k), params)
}

/// Feasible undirected solution with at most `k` edges. `g` must be the
/// bidirected form of the undirected graph; the caller projects the
/// returned out-tree with [`OutTree::to_undirected`].
pub fn solve_csm(g: &Digraph, oracle: &Residual<'_>, k: usize, params: &SolveParams) -> Result<Outcome> {
    params.validate(k)?;
    check_ground(g, oracle)?;
    run_guesses(g, oracle, k, &roots_of(g, params)?, &radii_of(params, k.div_ceil(2)), params)
}

/// Check that `delta` lies in `[1/k, 1]`.
pub fn check_delta(delta: f64, k: usize) -> Result<()> {
    let lo = 1.0 / k as f64;
    if !delta.is_finite() || delta < lo - 1e-12 || delta > 1.0 + 1e-12 {
        return Err(Error::Parameter(format!("delta = {delta} must lie in [1/k, 1] = [{lo}, 1]")));
    }
    Ok(())
}

/// Rooted solution at `v` with at most `(1 + δ)k` edges.
pub fn solve_drcsm_bicriteria(
    g: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    v: Vertex,
    delta: f64,
    params: &SolveParams,
) -> Result<Outcome> {
    params.validate(k)?;
    check_delta(delta, k)?;
    g.check_vertex(v)?;
    check_ground(g, oracle)?;
    let bfs = g.bfs(v)?;
    let pruned = g.restrict_to(&bfs.within(k));
    let limit = (1.0 + delta) * k as f64;
    let start = oracle.query_count();
    let sub = params.subroutine();
    let mut guesses = Vec::new();
    for r in radii_of(params, k) {
        let before = oracle.query_count();
        let (s, _) = greedy_radius(&pruned, oracle, k, v, r, sub.as_ref(), params.greedy_options())?;
        let candidate = if s.size() as f64 <= limit + 1e-9 {
            s.clone()
        } else {
            let p = partition_by_size(&s, delta * k as f64 / 2.0)?;
            let (i, _) = best_part(&p, oracle)?;
            let part = &p.parts[i];
            let mut t = OutTree::singleton(v);
            t.graft_in_place(&bfs.path_edges(part.root())?)?;
            t.graft_in_place(&part.outward_edges())?;
            t
        };
        let value = oracle.value(&candidate.vertices())?;
        let record = GuessRecord {
            root: v,
            radius: r,
            greedy_size: s.size(),
            value,
            size: candidate.size(),
            queries: oracle.query_count() - before,
        };
        guesses.push((record, candidate));
    }
    select(guesses, start, oracle)
}

/// Recursion depth `d = ⌈1/ε⌉` for `ε ∈ (0, 1]`.
pub fn depth_for_epsilon(eps: f64) -> Result<u32> {
    if !eps.is_finite() || eps <= 0.0 || eps > 1.0 {
        return Err(Error::Parameter(format!("epsilon = {eps} must lie in (0, 1]")));
    }
    Ok((1.0 / eps - 1e-9).ceil().max(1.0) as u32)
}

/// Feasible-solution factor `1 / (16 (d+1)³ r^{1/d})` with the recursive subroutine.
pub fn sharp_factor(d: u32, r: usize) -> f64 {
    let d1 = (d + 1) as f64;
    1.0 / (16.0 * d1.powi(3) * (r as f64).powf(1.0 / d as f64))
}

/// The same factor stated in `ε`: `ε³ / (16 (1+2ε)³ r^ε)`.
pub fn epsilon_factor(eps: f64, r: usize) -> f64 {
    eps.powi(3) / (16.0 * (1.0 + 2.0 * eps).powi(3) * (r as f64).powf(eps))
}

/// Feasible solution for accuracy `ε`: the directed or undirected solver
/// with the recursive subroutine at depth `⌈1/ε⌉`.
pub fn compose_feasible(
    g: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    eps: f64,
    directed: bool,
    params: &SolveParams,
) -> Result<Outcome> {
    let params = SolveParams { d: depth_for_epsilon(eps)?, subroutine: SubroutineKind::RecapproxD, ..params.clone() };
    if directed {
        solve_dcsm(g, oracle, k, &params)
    } else {
        solve_csm(g, oracle, k, &params)
    }
}

/// Bicriteria rooted solution for accuracy `ε` and violation `δ`; its value
/// factor is `δ` times [`epsilon_factor`].
pub fn compose_bicriteria(
    g: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    v: Vertex,
    delta: f64,
    eps: f64,
    params: &SolveParams,
) -> Result<Outcome> {
    let params = SolveParams { d: depth_for_epsilon(eps)?, subroutine: SubroutineKind::RecapproxD, ..params.clone() };
    solve_drcsm_bicriteria(g, oracle, k, v, delta, &params)
}

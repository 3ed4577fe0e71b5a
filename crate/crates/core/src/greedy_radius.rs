//! Radius-sensitive greedy: repeatedly append the best subtree, rooted near
//! `v`, found by a pluggable bicriteria subroutine.
//!
//! Run with size constraint `k` and radius `r`, it performs `⌊2k/r⌋` rounds.
//! Each round asks the subroutine for a size-`r` tree at every `w` within
//! distance `r − 1` of `v` on the residual objective, and grafts the most
//! valuable one together with the shortest `v → w` path. An
//! `(α, β)`-approximate subroutine yields value `≥ α(r)/2 · OPT` and size
//! `≤ 4β(r) k` against optima of height at most `r`.

use crate::error::{Error, Result};
use crate::exact::{exact_drcsm, EnumerationCap};
use crate::graph::{Digraph, OutTree, Vertex};
use crate::oracle::Residual;
use crate::recapprox::{check_ground, rec_approx_d, RecOptions};
use crate::trace::{AlgoTrace, IterationRecord};

/// Bicriteria factors: value `≥ alpha · OPT`, size `≤ beta · size`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guarantee {
    pub alpha: f64,
    pub beta: f64,
}

/// Rooted solver invoked once per candidate root and round.
pub trait Subroutine {
    fn name(&self) -> &'static str;

    /// Tree rooted at `root` with (approximately) at most `size` edges.
    fn solve(&self, g: &Digraph, oracle: &Residual<'_>, size: usize, root: Vertex) -> Result<OutTree>;

    /// Declared guarantee for size constraint `size`, if any.
    fn guarantee(&self, size: usize) -> Option<Guarantee>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSubroutine {
    pub cap: EnumerationCap,
}

impl Subroutine for ExactSubroutine {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(&self, g: &Digraph, oracle: &Residual<'_>, size: usize, root: Vertex) -> Result<OutTree> {
        Ok(exact_drcsm(g, oracle, size, root, None, self.cap)?.tree)
    }

    fn guarantee(&self, _size: usize) -> Option<Guarantee> {
        Some(Guarantee { alpha: 1.0, beta: 1.0 })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RecApproxD {
    pub depth: u32,
    pub options: RecOptions,
}

impl RecApproxD {
    pub fn new(depth: u32) -> Self {
        Self { depth, options: RecOptions::default() }
    }
}

/// `(1/(d+1), (d+1)² k^{1/d})`.
pub fn rec_approx_d_guarantee(d: u32, k: usize) -> Guarantee {
    let d1 = (d + 1) as f64;
    Guarantee { alpha: 1.0 / d1, beta: d1 * d1 * (k as f64).powf(1.0 / d as f64) }
}

impl Subroutine for RecApproxD {
    fn name(&self) -> &'static str {
        "recapprox-d"
    }

    fn solve(&self, g: &Digraph, oracle: &Residual<'_>, size: usize, root: Vertex) -> Result<OutTree> {
        Ok(rec_approx_d(g, oracle, size, root, self.depth, self.options)?.0)
    }

    fn guarantee(&self, size: usize) -> Option<Guarantee> {
        Some(rec_approx_d_guarantee(self.depth, size))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Stop once the best marginal gain is zero.
    pub early_stop: bool,
    /// Re-solve candidates in order of their previous gain and accept the
    /// first whose fresh gain beats every stale one. Faster, but selections
    /// can differ from the plain sweep.
    pub lazy: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { early_stop: true, lazy: false }
    }
}

struct Pick {
    root: Vertex,
    gain: f64,
    tree: OutTree,
}

fn checked_solve(
    sub: &dyn Subroutine,
    g: &Digraph,
    oracle: &Residual<'_>,
    r: usize,
    w: Vertex,
) -> Result<OutTree> {
    let t = sub.solve(g, oracle, r, w)?;
    if t.root() != w {
        return Err(Error::Contract(format!("{} returned a tree rooted at {} instead of {w}", sub.name(), t.root())));
    }
    if let Some(gu) = sub.guarantee(r) {
        if t.size() as f64 > gu.beta * r as f64 + 1e-9 {
            return Err(Error::Contract(format!(
                "{} returned {} edges, above its bound {} for size {r}",
                sub.name(),
                t.size(),
                gu.beta * r as f64
            )));
        }
    }
    t.check_in(g).map_err(|e| Error::Contract(format!("{} returned a tree outside the graph: {e}", sub.name())))?;
    Ok(t)
}

/// Radius-sensitive greedy from root `v` with size constraint `k` and
/// radius guess `r`.
pub fn greedy_radius(
    g: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    v: Vertex,
    r: usize,
    sub: &dyn Subroutine,
    options: GreedyOptions,
) -> Result<(OutTree, AlgoTrace)> {
    if r < 1 || r > k {
        return Err(Error::Parameter(format!("radius r = {r} must lie in [1, k = {k}]")));
    }
    g.check_vertex(v)?;
    check_ground(g, oracle)?;
    let start = oracle.query_count();
    let bfs = g.bfs_unchecked(v);
    let centers = bfs.within(r - 1);
    let rounds = 2 * k / r;
    let mut tree = OutTree::singleton(v);
    let mut trace = AlgoTrace::default();
    let mut calls = 0u64;
    let mut stale: Vec<f64> = vec![f64::INFINITY; centers.len()];

    for iteration in 1..=rounds {
        let cond = oracle.condition_unchecked(&tree.vertices());
        let mut best: Option<Pick> = None;
        if options.lazy {
            let mut order: Vec<usize> = (0..centers.len()).collect();
            order.sort_by(|&a, &b| stale[b].total_cmp(&stale[a]).then(a.cmp(&b)));
            for (pos, &i) in order.iter().enumerate() {
                let w = centers[i];
                let sub_tree = checked_solve(sub, g, &cond, r, w)?;
                calls += 1;
                let gain = cond.eval(&sub_tree.vertices());
                stale[i] = gain;
                if best.as_ref().map_or(true, |b| gain > b.gain) {
                    best = Some(Pick { root: w, gain, tree: sub_tree });
                }
                let next_bound = order.get(pos + 1).map_or(f64::NEG_INFINITY, |&j| stale[j]);
                if best.as_ref().is_some_and(|b| b.gain >= next_bound) {
                    break;
                }
            }
        } else {
            for &w in &centers {
                let sub_tree = checked_solve(sub, g, &cond, r, w)?;
                calls += 1;
                let gain = cond.eval(&sub_tree.vertices());
                if best.as_ref().map_or(true, |b| gain > b.gain) {
                    best = Some(Pick { root: w, gain, tree: sub_tree });
                }
            }
        }
        let best = best.expect("centers contain v");
        if options.early_stop && best.gain <= 0.0 {
            trace.stopped_early = true;
            break;
        }
        tree.graft_in_place(&bfs.path_edges(best.root)?)?;
        tree.graft_in_place(&best.tree.outward_edges())?;
        trace.iterations.push(IterationRecord {
            iteration,
            root: best.root,
            size_guess: None,
            gain: best.gain,
            remaining: None,
            window: None,
        });
    }
    trace.subroutine_calls = Some(calls);
    trace.oracle_queries = oracle.query_count() - start;
    Ok((tree, trace))
}

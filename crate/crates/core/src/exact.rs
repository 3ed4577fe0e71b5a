//! Brute-force optima for small instances.
//!
//! A vertex set admits a spanning out-tree rooted at `v` with `|S| − 1` edges
//! exactly when every member is reachable from `v` inside the induced
//! subgraph, so the solvers enumerate such sets rather than edge subsets.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Digraph, OutTree, Vertex};
use crate::oracle::Residual;
use crate::recapprox::check_ground;

pub const CAP_ENV: &str = "ARBORMAX_CAP";

/// Hard limits on brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap {
    pub max_vertices: usize,
    pub max_sets: u64,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        Self { max_vertices: 20, max_sets: 5_000_000 }
    }
}

impl EnumerationCap {
    /// Default cap with `max_sets` overridden by `ARBORMAX_CAP` when set.
    pub fn from_env() -> Result<Self> {
        let mut cap = Self::default();
        if let Ok(raw) = std::env::var(CAP_ENV) {
            cap.max_sets = raw
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("{CAP_ENV} must be a positive integer, got {raw:?}")))?;
        }
        Ok(cap)
    }

    fn check_graph(&self, g: &Digraph) -> Result<()> {
        if g.n() > self.max_vertices {
            return Err(Error::TooLarge(format!(
                "{} vertices exceed the exact-solver cap of {} vertices",
                g.n(),
                self.max_vertices
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Free,
    Member,
    Frontier,
    Excluded,
}

struct Enumerator<'a, F> {
    g: &'a Digraph,
    max_size: usize,
    cap: EnumerationCap,
    count: u64,
    members: Vec<Vertex>,
    marks: Vec<Mark>,
    emit: F,
}

impl<F: FnMut(&[Vertex])> Enumerator<'_, F> {
    /// Emits the current set, then branches on each frontier vertex in turn:
    /// include it, or exclude it from every later branch.
    fn extend(&mut self, frontier: &[Vertex]) -> Result<()> {
        self.count += 1;
        if self.count > self.cap.max_sets {
            return Err(Error::TooLarge(format!(
                "enumeration exceeded the exact-solver cap of {} sets",
                self.cap.max_sets
            )));
        }
        let mut sorted = self.members.clone();
        sorted.sort_unstable();
        (self.emit)(&sorted);
        if self.members.len() >= self.max_size {
            return Ok(());
        }
        for (i, &u) in frontier.iter().enumerate() {
            self.members.push(u);
            self.marks[u] = Mark::Member;
            let mut next = frontier[i + 1..].to_vec();
            let start = next.len();
            for &w in self.g.out_neighbors(u) {
                if self.marks[w] == Mark::Free {
                    self.marks[w] = Mark::Frontier;
                    next.push(w);
                }
            }
            self.extend(&next)?;
            for &w in &next[start..] {
                self.marks[w] = Mark::Free;
            }
            self.members.pop();
            self.marks[u] = Mark::Excluded;
        }
        for &u in frontier {
            self.marks[u] = Mark::Frontier;
        }
        Ok(())
    }
}

/// Calls `emit` once for every vertex set that contains `v`, has at most
/// `max_size` vertices and is reachable from `v` inside its induced subgraph.
/// Sets arrive sorted. Returns the number of sets emitted.
pub fn enumerate_connected_sets<F>(
    g: &Digraph,
    v: Vertex,
    max_size: usize,
    cap: EnumerationCap,
    emit: F,
) -> Result<u64>
where
    F: FnMut(&[Vertex]),
{
    g.check_vertex(v)?;
    cap.check_graph(g)?;
    if max_size == 0 {
        return Ok(0);
    }
    let mut marks = vec![Mark::Free; g.n()];
    marks[v] = Mark::Member;
    let frontier: Vec<Vertex> = g.out_neighbors(v).to_vec();
    for &w in &frontier {
        marks[w] = Mark::Frontier;
    }
    let mut run = Enumerator { g, max_size, cap, count: 0, members: vec![v], marks, emit };
    run.extend(&frontier)?;
    Ok(run.count)
}

pub fn connected_sets(g: &Digraph, v: Vertex, max_size: usize, cap: EnumerationCap) -> Result<Vec<Vec<Vertex>>> {
    let mut out = Vec::new();
    enumerate_connected_sets(g, v, max_size, cap, |s| out.push(s.to_vec()))?;
    Ok(out)
}

/// BFS from `root` restricted to the sorted vertex set `members`; returns
/// `(vertex, depth, parent)` in visiting order. Parents are the lowest-id
/// predecessor one layer up, matching [`Digraph::bfs`].
fn induced_bfs(g: &Digraph, members: &[Vertex], root: Vertex) -> Vec<(Vertex, usize, Option<Vertex>)> {
    let inside = |w: Vertex| members.binary_search(&w).is_ok();
    let mut depth: Vec<Option<usize>> = vec![None; members.len()];
    let idx = |w: Vertex| members.binary_search(&w).expect("member");
    depth[idx(root)] = Some(0);
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let du = depth[idx(u)].unwrap();
        for &w in g.out_neighbors(u) {
            if inside(w) && depth[idx(w)].is_none() {
                depth[idx(w)] = Some(du + 1);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let mut parent: Vec<Option<Vertex>> = vec![None; members.len()];
    for &u in members {
        let Some(du) = depth[idx(u)] else { continue };
        for &w in g.out_neighbors(u) {
            if inside(w) && w != root && parent[idx(w)].is_none() && depth[idx(w)] == Some(du + 1) {
                parent[idx(w)] = Some(u);
            }
        }
    }
    order.into_iter().map(|w| (w, depth[idx(w)].unwrap(), parent[idx(w)])).collect()
}

fn bfs_tree(g: &Digraph, members: &[Vertex], root: Vertex) -> OutTree {
    let edges = induced_bfs(g, members, root)
        .into_iter()
        .filter_map(|(w, _, p)| p.map(|p| (p, w)));
    OutTree::from_edges(root, edges).expect("BFS parents form an out-tree")
}

fn eccentricity(g: &Digraph, members: &[Vertex], root: Vertex) -> Option<usize> {
    let layers = induced_bfs(g, members, root);
    (layers.len() == members.len()).then(|| layers.iter().map(|&(_, d, _)| d).max().unwrap_or(0))
}

/// Optimum of a brute-force search.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    /// BFS spanning out-tree of the optimal set. For the undirected solver it
    /// is rooted at the set's center.
    pub tree: OutTree,
    pub value: f64,
    /// Height of `tree`; for the undirected solver, the radius of the set.
    pub height: usize,
    pub enumerated: u64,
}

/// Best out-tree rooted at `v` with at most `k` edges and, if `height_cap`
/// is set, height at most `height_cap`.
pub fn exact_drcsm(
    g: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    v: Vertex,
    height_cap: Option<usize>,
    cap: EnumerationCap,
) -> Result<ExactResult> {
    check_ground(g, oracle)?;
    let mut best: Option<(Vec<Vertex>, f64)> = None;
    let enumerated = enumerate_connected_sets(g, v, k + 1, cap, |set| {
        if let Some(h) = height_cap {
            if set.len() > h + 1 && eccentricity(g, set, v).map_or(true, |e| e > h) {
                return;
            }
        }
        let value = oracle.eval(set);
        if best.as_ref().map_or(true, |(_, b)| value > *b) {
            best = Some((set.to_vec(), value));
        }
    })?;
    let (set, value) = best.expect("the singleton {v} is always enumerated");
    let tree = bfs_tree(g, &set, v);
    Ok(ExactResult { height: tree.height(), tree, value, enumerated })
}

/// Best out-tree with at most `k` edges over all roots (lowest root on ties).
pub fn exact_dcsm(g: &Digraph, oracle: &Residual<'_>, k: usize, cap: EnumerationCap) -> Result<ExactResult> {
    let mut best: Option<ExactResult> = None;
    let mut enumerated = 0;
    for v in 0..g.n() {
        let r = exact_drcsm(g, oracle, k, v, None, cap)?;
        enumerated += r.enumerated;
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or_else(|| Error::Parameter("graph has no vertices".into()))?;
    best.enumerated = enumerated;
    Ok(best)
}

/// Best undirected tree with at most `k` edges. `g` is the bidirected form
/// of the undirected graph. The reported tree is the BFS tree from the
/// optimal set's center (lowest id among minimum-eccentricity vertices).
pub fn exact_csm(g: &Digraph, oracle: &Residual<'_>, k: usize, cap: EnumerationCap) -> Result<ExactResult> {
    let best = exact_dcsm(g, oracle, k, cap)?;
    let members = best.tree.vertices();
    let (center, radius) = members
        .iter()
        .filter_map(|&c| eccentricity(g, &members, c).map(|e| (c, e)))
        .min_by_key(|&(c, e)| (e, c))
        .expect("the optimal set is connected");
    Ok(ExactResult { tree: bfs_tree(g, &members, center), value: best.value, height: radius, enumerated: best.enumerated })
}

//! Edge-disjoint partitions of out-trees into out-subtrees.
//!
//! Parts may share vertices at cut points but never edges, and every part is
//! itself rooted. Two partitioners are provided:
//!
//! * [`partition_by_size`]: parts of `1..=⌊2s⌋` edges, at most `⌊m/s⌋` of
//!   them. Used to cut an oversized solution down to feasible pieces.
//! * [`partition_balanced`]: parts of `s..=3s` edges, obtained by repeated
//!   [`balanced_split`].

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{OutTree, Vertex};
use crate::oracle::Residual;

/// Edge-disjoint out-subtrees covering a source tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub parts: Vec<OutTree>,
    pub source: OutTree,
    pub s: f64,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Subtree sizes (edge counts below each vertex).
fn subtree_sizes(children: &BTreeMap<Vertex, Vec<Vertex>>, order: &[Vertex]) -> BTreeMap<Vertex, usize> {
    let mut size = BTreeMap::new();
    for &u in order.iter().rev() {
        let below = children
            .get(&u)
            .map(|cs| cs.iter().map(|c| 1 + size[c]).sum())
            .unwrap_or(0);
        size.insert(u, below);
    }
    size
}

/// Pre-order (parents before children) listing of every vertex.
fn preorder(t: &OutTree, children: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Vertex> {
    let mut order = Vec::with_capacity(t.vertex_count());
    let mut stack = vec![t.root()];
    while let Some(u) = stack.pop() {
        order.push(u);
        if let Some(cs) = children.get(&u) {
            stack.extend(cs.iter().rev());
        }
    }
    order
}

fn collect_subtree(children: &BTreeMap<Vertex, Vec<Vertex>>, top: Vertex, out: &mut Vec<(Vertex, Vertex)>) {
    let mut stack = vec![top];
    while let Some(u) = stack.pop() {
        if let Some(cs) = children.get(&u) {
            for &c in cs {
                out.push((u, c));
                stack.push(c);
            }
        }
    }
}

/// Splits `t` at a 1/3–2/3 separator into two edge-disjoint out-subtrees.
///
/// One piece is rooted at the separator vertex and holds some of its child
/// branches; the other is the rest of `t` and keeps `t`'s root. The pair is
/// returned smaller first, with `m/3 <= m(first) <= m(second) <= 2m/3`.
pub fn balanced_split(t: &OutTree) -> Result<(OutTree, OutTree)> {
    let m = t.size();
    if m < 2 {
        return Err(Error::Size(format!("balanced split needs at least 2 edges, tree has {m}")));
    }
    let children = t.children();
    let order = preorder(t, &children);
    let below = subtree_sizes(&children, &order);
    let branch = |c: &Vertex| 1 + below[c];

    // Walk down while some branch is heavier than 2m/3. Branch sizes shrink
    // strictly, so this stops.
    let mut sep = t.root();
    while let Some(&heavy) = children
        .get(&sep)
        .and_then(|cs| cs.iter().find(|c| 3 * branch(c) > 2 * m))
    {
        sep = heavy;
    }

    let branches = children.get(&sep).map(Vec::as_slice).unwrap_or(&[]);
    let chosen: Vec<Vertex> = match branches.iter().find(|c| 3 * branch(c) >= m) {
        Some(&c) => vec![c],
        None => {
            let mut acc = 0;
            let mut picked = Vec::new();
            for &c in branches {
                picked.push(c);
                acc += branch(&c);
                if 3 * acc >= m {
                    break;
                }
            }
            picked
        }
    };

    let mut detached = Vec::new();
    for &c in &chosen {
        detached.push((sep, c));
        collect_subtree(&children, c, &mut detached);
    }
    let detached_set: std::collections::BTreeSet<(Vertex, Vertex)> = detached.iter().copied().collect();
    let remainder: Vec<(Vertex, Vertex)> = t.edges().filter(|e| !detached_set.contains(e)).collect();

    let a = OutTree::from_edges(sep, detached)?;
    let b = OutTree::from_edges(t.root(), remainder)?;
    if a.size() <= b.size() {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

/// Partitions `t` into parts with `s <= m(part) <= 3s` by splitting any part
/// over `3s` at a balanced separator until none remain.
pub fn partition_balanced(t: &OutTree, s: f64) -> Result<Partition> {
    if !s.is_finite() || 3.0 * s < 1.0 {
        return Err(Error::Parameter(format!(
            "balanced partition needs s >= 1/3 so that single edges fit, got {s}"
        )));
    }
    if (t.size() as f64) < s {
        return Err(Error::Size(format!("tree has {} edges, fewer than s = {s}", t.size())));
    }
    let mut work = VecDeque::from([t.clone()]);
    let mut parts = Vec::new();
    while let Some(p) = work.pop_front() {
        if p.size() as f64 > 3.0 * s {
            let (a, b) = balanced_split(&p)?;
            work.push_back(a);
            work.push_back(b);
        } else {
            parts.push(p);
        }
    }
    Ok(Partition { parts, source: t.clone(), s })
}

/// Partitions `t` into at most `⌊m/s⌋` parts of `1..=⌊2s⌋` edges each.
///
/// Bottom-up accumulation: every vertex collects its child branches (edge to
/// the child plus the child's open residual). A branch of at least `s` edges
/// is cut alone; otherwise branches are pooled and the pool is cut once it
/// reaches `s`. What is left open at a vertex has fewer than `s` edges and
/// travels up. Every cut part therefore has at least `s` edges. The final
/// open residual at the root is merged into an adjacent part; a merge that
/// exceeds `⌊2s⌋` (and hence `2s`) is re-split once at a balanced separator.
pub fn partition_by_size(t: &OutTree, s: f64) -> Result<Partition> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Parameter(format!("partition size s must be positive, got {s}")));
    }
    if s < 0.5 {
        return Err(Error::Parameter(format!(
            "partition size s = {s} leaves no room for a single edge (⌊2s⌋ = 0)"
        )));
    }
    let m = t.size();
    if (m as f64) < s {
        return Err(Error::Size(format!("tree has {m} edges, fewer than s = {s}")));
    }
    let upper = (2.0 * s).floor() as usize;
    let big = |len: usize| len as f64 >= s;

    let children = t.children();
    let order = preorder(t, &children);
    let mut open: BTreeMap<Vertex, Vec<(Vertex, Vertex)>> = BTreeMap::new();
    let mut cut: Vec<(Vertex, Vec<(Vertex, Vertex)>)> = Vec::new();

    for &u in order.iter().rev() {
        let mut pool: Vec<(Vertex, Vertex)> = Vec::new();
        for &c in children.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            let mut branch = vec![(u, c)];
            branch.extend(open.remove(&c).unwrap_or_default());
            if big(branch.len()) {
                cut.push((u, branch));
            } else {
                pool.extend(branch);
                if big(pool.len()) {
                    cut.push((u, std::mem::take(&mut pool)));
                }
            }
        }
        open.insert(u, pool);
    }

    let residual = open.remove(&t.root()).unwrap_or_default();
    let mut pieces: Vec<OutTree> = Vec::with_capacity(cut.len() + 1);
    if residual.is_empty() {
        for (root, edges) in cut {
            pieces.push(OutTree::from_edges(root, edges)?);
        }
    } else {
        // Parts touching the residual are exactly those cut at one of its
        // vertices; merging keeps the root and stays connected.
        let mut residual_vertices: Vec<Vertex> = residual.iter().map(|&(_, c)| c).collect();
        residual_vertices.push(t.root());
        residual_vertices.sort_unstable();
        let target = cut
            .iter()
            .enumerate()
            .filter(|(_, (root, _))| residual_vertices.binary_search(root).is_ok())
            .min_by_key(|(i, (_, edges))| (edges.len(), *i))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Structure("root residual has no adjacent part".into()))?;
        for (i, (root, edges)) in cut.into_iter().enumerate() {
            if i != target {
                pieces.push(OutTree::from_edges(root, edges)?);
                continue;
            }
            let mut merged_edges = residual.clone();
            merged_edges.extend(edges);
            let merged = OutTree::from_edges(t.root(), merged_edges)?;
            if merged.size() <= upper {
                pieces.push(merged);
            } else {
                let (a, b) = balanced_split(&merged)?;
                pieces.push(a);
                pieces.push(b);
            }
        }
    }
    Ok(Partition { parts: pieces, source: t.clone(), s })
}

/// Index and value of the most valuable part; ties go to the lowest index.
pub fn best_part(p: &Partition, oracle: &Residual<'_>) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, part) in p.parts.iter().enumerate() {
        let value = oracle.value(&part.vertices())?;
        if best.map_or(true, |(_, b)| value > b) {
            best = Some((i, value));
        }
    }
    best.ok_or_else(|| Error::Size("cannot pick a part from an empty partition".into()))
}

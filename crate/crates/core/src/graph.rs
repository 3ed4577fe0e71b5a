//! Directed graphs, breadth-first distance queries and rooted out-trees.
//!
//! Every solver in this crate reads a [`Digraph`] and produces an [`OutTree`].
//! Undirected inputs are bidirected on the way in and projected back with
//! [`OutTree::to_undirected`] on the way out.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// Static adjacency-list digraph over vertices `0..n`.
///
/// Self-loops are rejected and parallel edges collapse to one. Out-neighbor
/// lists are sorted, which makes every traversal visit neighbors by
/// ascending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl Digraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut out = vec![Vec::new(); n];
        for (u, v) in edges {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u == v {
                return Err(Error::Structure(format!("self-loop at vertex {u}")));
            }
            out[u].push(v);
        }
        let mut edge_count = 0;
        for list in &mut out {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Self { out, edge_count })
    }

    /// Builds the digraph holding both orientations of every undirected edge.
    pub fn bidirect<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        Self::new(n, edges.into_iter().flat_map(|(u, v)| [(u, v), (v, u)]))
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.out[u].binary_search(&v).is_ok()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        check_vertex(v, self.n())
    }

    /// Breadth-first search from `source`, keeping distances and the
    /// lowest-id shortest-path predecessor of every reachable vertex.
    pub fn bfs(&self, source: Vertex) -> Result<Bfs> {
        self.check_vertex(source)?;
        Ok(self.bfs_unchecked(source))
    }

    pub(crate) fn bfs_unchecked(&self, source: Vertex) -> Bfs {
        let n = self.n();
        let mut dist = vec![None; n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let next = dist[u].map(|d| d + 1);
            for &w in &self.out[u] {
                if dist[w].is_none() {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        // A second pass in id order picks, for each vertex, the smallest
        // predecessor that sits one layer closer to the source.
        let mut parent = vec![None; n];
        for u in 0..n {
            let Some(du) = dist[u] else { continue };
            for &w in &self.out[u] {
                if parent[w].is_none() && w != source && dist[w] == Some(du + 1) {
                    parent[w] = Some(u);
                }
            }
        }
        Bfs { source, dist, parent }
    }

    /// Exact shortest-path edge counts from `source`; `None` marks
    /// unreachable vertices.
    pub fn bfs_distances(&self, source: Vertex) -> Result<Vec<Option<usize>>> {
        Ok(self.bfs(source)?.dist)
    }

    /// Sorted set `{w : dist(v, w) <= h}`.
    pub fn vertices_within(&self, v: Vertex, h: usize) -> Result<Vec<Vertex>> {
        Ok(self.bfs(v)?.within(h))
    }

    pub fn shortest_path(&self, from: Vertex, to: Vertex) -> Result<Vec<Vertex>> {
        self.check_vertex(to)?;
        self.bfs(from)?.path_to(to)
    }

    /// Same vertex ids, keeping only edges with both endpoints in `keep`.
    pub fn restrict_to(&self, keep: &[Vertex]) -> Digraph {
        let mut mask = vec![false; self.n()];
        for &v in keep {
            if v < mask.len() {
                mask[v] = true;
            }
        }
        let mut edge_count = 0;
        let out = self
            .out
            .iter()
            .enumerate()
            .map(|(u, list)| {
                if !mask[u] {
                    return Vec::new();
                }
                let kept: Vec<Vertex> = list.iter().copied().filter(|&w| mask[w]).collect();
                edge_count += kept.len();
                kept
            })
            .collect();
        Digraph { out, edge_count }
    }
}

fn check_vertex(v: Vertex, n: usize) -> Result<()> {
    if v < n {
        Ok(())
    } else {
        Err(Error::VertexOutOfRange { vertex: v, n })
    }
}

/// Result of a breadth-first search; doubles as the per-source distance cache
/// used by the guessing loops.
#[derive(Debug, Clone)]
pub struct Bfs {
    source: Vertex,
    dist: Vec<Option<usize>>,
    parent: Vec<Option<Vertex>>,
}

impl Bfs {
    pub fn source(&self) -> Vertex {
        self.source
    }

    pub fn distance(&self, v: Vertex) -> Option<usize> {
        self.dist.get(v).copied().flatten()
    }

    pub fn distances(&self) -> &[Option<usize>] {
        &self.dist
    }

    pub fn within(&self, h: usize) -> Vec<Vertex> {
        (0..self.dist.len())
            .filter(|&w| matches!(self.dist[w], Some(d) if d <= h))
            .collect()
    }

    pub fn path_to(&self, target: Vertex) -> Result<Vec<Vertex>> {
        if self.distance(target).is_none() {
            return Err(Error::NoPath { from: self.source, to: target });
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Edges of [`Bfs::path_to`] in source-to-target order.
    pub fn path_edges(&self, target: Vertex) -> Result<Vec<(Vertex, Vertex)>> {
        let path = self.path_to(target)?;
        Ok(path.windows(2).map(|w| (w[0], w[1])).collect())
    }
}

/// Rooted arborescence: every non-root vertex has exactly one parent and
/// following parents always ends at the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutTree {
    root: Vertex,
    parent: BTreeMap<Vertex, Vertex>,
}

impl OutTree {
    pub fn singleton(root: Vertex) -> Self {
        Self { root, parent: BTreeMap::new() }
    }

    /// Builds a tree from `(parent, child)` edges given in any order.
    pub fn from_edges<I>(root: Vertex, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut parent = BTreeMap::new();
        for (p, c) in edges {
            if c == root {
                return Err(Error::Structure(format!("root {root} given parent {p}")));
            }
            if let Some(prev) = parent.insert(c, p) {
                return Err(Error::Structure(format!(
                    "vertex {c} has two parents ({prev} and {p})"
                )));
            }
        }
        let tree = Self { root, parent };
        tree.check_rooted()?;
        Ok(tree)
    }

    fn check_rooted(&self) -> Result<()> {
        // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root.
        let mut state: BTreeMap<Vertex, u8> = BTreeMap::new();
        for &start in self.parent.keys() {
            let mut walk = Vec::new();
            let mut cur = start;
            loop {
                if cur == self.root || state.get(&cur) == Some(&2) {
                    break;
                }
                if state.get(&cur) == Some(&1) {
                    return Err(Error::Structure(format!("cycle through vertex {cur}")));
                }
                state.insert(cur, 1);
                walk.push(cur);
                match self.parent.get(&cur) {
                    Some(&p) => cur = p,
                    None => {
                        return Err(Error::Structure(format!(
                            "vertex {cur} is disconnected from root {}",
                            self.root
                        )))
                    }
                }
            }
            for v in walk {
                state.insert(v, 2);
            }
        }
        Ok(())
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    /// Edge count `m(S)`.
    pub fn size(&self) -> usize {
        self.parent.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    pub fn parent_of(&self, v: Vertex) -> Option<Vertex> {
        self.parent.get(&v).copied()
    }

    /// Sorted vertex ids.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.parent.keys().copied().collect();
        let pos = vs.partition_point(|&v| v < self.root);
        vs.insert(pos, self.root);
        vs
    }

    /// `(parent, child)` pairs ordered by child id.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent.iter().map(|(&c, &p)| (p, c))
    }

    pub fn children(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut children: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for (&c, &p) in &self.parent {
            children.entry(p).or_default().push(c);
        }
        children
    }

    /// Edges in breadth-first order from the root, so every edge's tail is
    /// already present when it is replayed through [`OutTree::graft`].
    pub fn outward_edges(&self) -> Vec<(Vertex, Vertex)> {
        let children = self.children();
        let mut order = Vec::with_capacity(self.size());
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            if let Some(cs) = children.get(&u) {
                for &c in cs {
                    order.push((u, c));
                    queue.push_back(c);
                }
            }
        }
        order
    }

    /// Depth of every vertex below the root.
    pub fn depths(&self) -> BTreeMap<Vertex, usize> {
        let mut depth = BTreeMap::from([(self.root, 0)]);
        for (p, c) in self.outward_edges() {
            let d = depth[&p] + 1;
            depth.insert(c, d);
        }
        depth
    }

    /// Height: the largest root-to-vertex distance.
    pub fn height(&self) -> usize {
        self.depths().values().copied().max().unwrap_or(0)
    }

    /// Center and radius of the undirected projection; ties go to the
    /// lowest vertex id.
    pub fn undirected_center(&self) -> (Vertex, usize) {
        let verts = self.vertices();
        let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for (p, c) in self.edges() {
            adj.entry(p).or_default().push(c);
            adj.entry(c).or_default().push(p);
        }
        let mut best = (self.root, usize::MAX);
        for &v in &verts {
            let mut dist = BTreeMap::from([(v, 0usize)]);
            let mut queue = VecDeque::from([v]);
            let mut ecc = 0;
            while let Some(u) = queue.pop_front() {
                let du = dist[&u];
                ecc = ecc.max(du);
                for &w in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if !dist.contains_key(&w) {
                        dist.insert(w, du + 1);
                        queue.push_back(w);
                    }
                }
            }
            if ecc < best.1 {
                best = (v, ecc);
            }
        }
        best
    }

    /// Union with `addition`, kept as an out-tree rooted at `self.root()`.
    ///
    /// Edges are replayed in the given order. An edge whose head is already
    /// in the tree is skipped; later edges leaving that head still apply.
    pub fn graft(&self, addition: &[(Vertex, Vertex)]) -> Result<OutTree> {
        let mut tree = self.clone();
        tree.graft_in_place(addition)?;
        Ok(tree)
    }

    pub fn graft_in_place(&mut self, addition: &[(Vertex, Vertex)]) -> Result<()> {
        for &(a, b) in addition {
            if !self.contains(a) {
                return Err(Error::Structure(format!(
                    "edge ({a}, {b}) does not start inside the tree"
                )));
            }
            if !self.contains(b) {
                self.parent.insert(b, a);
            }
        }
        Ok(())
    }

    /// Checks that every tree edge exists in `g`.
    pub fn check_in(&self, g: &Digraph) -> Result<()> {
        g.check_vertex(self.root)?;
        for (p, c) in self.edges() {
            if !g.has_edge(p, c) {
                return Err(Error::Structure(format!("edge ({p}, {c}) is not in the graph")));
            }
        }
        Ok(())
    }

    /// Drops edge directions.
    pub fn to_undirected(&self) -> UndirectedTree {
        let mut edges: Vec<(Vertex, Vertex)> =
            self.edges().map(|(p, c)| (p.min(c), p.max(c))).collect();
        edges.sort_unstable();
        UndirectedTree { vertices: self.vertices(), edges }
    }
}

/// Undirected tree given by its sorted vertex set and normalized `(min, max)`
/// edge pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedTree {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl UndirectedTree {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Connected and acyclic over exactly `vertices`.
    pub fn is_tree(&self) -> bool {
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let index: BTreeMap<Vertex, usize> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) else {
                return false;
            };
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra == rb {
                return false;
            }
            uf[ra] = rb;
        }
        true
    }
}

//! Recursive density greedy for rooted connected submodular maximization.
//!
//! `rec_approx(b, v, q)` grows an out-tree from `v`. While budget remains it
//! guesses a subtree root `w` within distance `b − 1` and a size `c` from a
//! window derived from `b / q` and the remaining budget, solves each guess
//! recursively on the residual objective, and appends the guess with the best
//! marginal gain per unit of `c` together with a shortest `v → w` path.
//! With `q = k^{1/d}` this is the depth-`d` variant: value at least
//! `OPT / (d + 1)` and size at most `(d + 1)² k^{1/d} k`.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::graph::{Digraph, OutTree, Vertex};
use crate::oracle::Residual;
use crate::trace::{AlgoTrace, IterationRecord};

const REAL_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
enum Divisor {
    /// `q = (num / den)^(1 / root)`.
    Exact { num: u64, den: u64, root: u32 },
    Real(f64),
}

/// Size divisor `q > 1`.
///
/// Divisors built from integers, ratios or integer roots compare exactly
/// against integer sizes; [`SizeDivisor::real`] falls back to floating
/// point with a `1e-12` nudge on floors and ceilings.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDivisor(Divisor);

fn pow(base: u64, exp: u32) -> BigUint {
    BigUint::from(base).pow(exp)
}

impl SizeDivisor {
    /// `q = k^{1/d}`.
    pub fn kth_root(k: u64, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("root degree d must be at least 1".into()));
        }
        if k < 2 {
            return Err(Error::Parameter(format!("k^(1/d) must exceed 1, got k = {k}")));
        }
        Ok(Self(Divisor::Exact { num: k, den: 1, root: d }))
    }

    /// `q = num / den`.
    pub fn ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num <= den {
            return Err(Error::Parameter(format!("size divisor {num}/{den} must exceed 1")));
        }
        Ok(Self(Divisor::Exact { num, den, root: 1 }))
    }

    pub fn integer(q: u64) -> Result<Self> {
        Self::ratio(q, 1)
    }

    pub fn real(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 1.0 {
            return Err(Error::Parameter(format!("size divisor q must exceed 1, got {q}")));
        }
        Ok(Self(Divisor::Real(q)))
    }

    pub fn value(&self) -> f64 {
        match self.0 {
            Divisor::Exact { num, den, root } => (num as f64 / den as f64).powf(1.0 / root as f64),
            Divisor::Real(q) => q,
        }
    }

    /// Smallest `ℓ >= 0` with `q^ℓ >= b`, i.e. `q^{ℓ−1} < b <= q^ℓ`.
    pub fn level(&self, b: usize) -> u32 {
        match self.0 {
            Divisor::Exact { num, den, root } => {
                let target = pow(b as u64, root);
                let mut level = 0;
                while pow(num, level) < &target * pow(den, level) {
                    level += 1;
                }
                level
            }
            Divisor::Real(q) => {
                let target = b as f64 * (1.0 - REAL_NUDGE);
                let mut level = 0;
                while q.powi(level as i32) < target {
                    level += 1;
                }
                level
            }
        }
    }

    /// Compares `b / q` with the fraction `x / y` (exact divisors only).
    fn cmp_quotient(num: u64, den: u64, root: u32, b: usize, x: usize, y: usize) -> Ordering {
        // b/q ? x/y  <=>  (b y)^root den ? x^root num
        let lhs = pow((b * y) as u64, root) * BigUint::from(den);
        let rhs = pow(x as u64, root) * BigUint::from(num);
        lhs.cmp(&rhs)
    }

    /// Size-guess window `[⌈x/3⌉, ⌊x⌋]` with `x = max{min{b/q, remaining}, 1}`.
    pub fn window(&self, b: usize, remaining: usize) -> (usize, usize) {
        debug_assert!(remaining >= 1);
        match self.0 {
            Divisor::Exact { num, den, root } => {
                let cmp = |x: usize, y: usize| Self::cmp_quotient(num, den, root, b, x, y);
                if cmp(remaining, 1) != Ordering::Less {
                    // b/q >= remaining: x is the (integer) remaining budget.
                    return (remaining.div_ceil(3), remaining);
                }
                if cmp(1, 1) != Ordering::Greater {
                    return (1, 1);
                }
                let hi = (1..=b).rev().find(|&c| cmp(c, 1) != Ordering::Less).unwrap_or(1);
                let lo = (1..=b).find(|&c| cmp(3 * c, 1) != Ordering::Greater).unwrap_or(1);
                (lo, hi)
            }
            Divisor::Real(q) => {
                let x = (b as f64 / q).min(remaining as f64).max(1.0);
                let hi = (x + REAL_NUDGE).floor() as usize;
                let lo = ((x / 3.0 - REAL_NUDGE).ceil() as usize).max(1);
                (lo, hi.max(lo))
            }
        }
    }
}

/// Size constraint `b` together with its divisor `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecParams {
    pub b: usize,
    pub q: SizeDivisor,
}

impl RecParams {
    pub fn new(b: usize, q: SizeDivisor) -> Result<Self> {
        if b < 1 {
            return Err(Error::Parameter("size constraint b must be at least 1".into()));
        }
        Ok(Self { b, q })
    }

    pub fn level(&self) -> u32 {
        self.q.level(self.b)
    }

    pub fn window(&self, remaining: usize) -> (usize, usize) {
        self.q.window(self.b, remaining)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecOptions {
    /// Stop as soon as the best marginal density is zero.
    pub early_stop: bool,
}

impl Default for RecOptions {
    fn default() -> Self {
        Self { early_stop: true }
    }
}

impl RecOptions {
    /// Runs every budget iteration, as the plain algorithm does.
    pub fn faithful() -> Self {
        Self { early_stop: false }
    }
}

struct Candidate {
    root: Vertex,
    size: usize,
    gain: f64,
    tree: OutTree,
}

impl Candidate {
    /// Higher density `gain / size` first (cross-multiplied), then larger gain.
    /// Callers scan roots and sizes in ascending order and replace only on a
    /// strict win, which settles remaining ties toward the lower root and the
    /// smaller size.
    fn beaten_by(&self, gain: f64, size: usize) -> bool {
        let challenger = gain * self.size as f64;
        let incumbent = self.gain * size as f64;
        challenger > incumbent || (challenger == incumbent && gain > self.gain)
    }
}

struct Recursion<'g> {
    graph: &'g Digraph,
    q: &'g SizeDivisor,
    early_stop: bool,
}

impl Recursion<'_> {
    fn base(&self, oracle: &Residual<'_>, v: Vertex) -> (OutTree, f64) {
        let mut best: Option<(Vertex, f64)> = None;
        for &w in self.graph.out_neighbors(v) {
            let pair = if v < w { [v, w] } else { [w, v] };
            let value = oracle.eval(&pair);
            if best.map_or(true, |(_, b)| value > b) {
                best = Some((w, value));
            }
        }
        match best {
            Some((w, value)) => {
                let mut t = OutTree::singleton(v);
                t.graft_in_place(&[(v, w)]).expect("root is in the tree");
                (t, value)
            }
            // No out-neighbors: the singleton is the only feasible tree.
            None => (OutTree::singleton(v), oracle.eval(&[v])),
        }
    }

    fn solve(&self, oracle: &Residual<'_>, b: usize, v: Vertex, mut trace: Option<&mut AlgoTrace>) -> OutTree {
        if b == 1 {
            return self.base(oracle, v).0;
        }
        let bfs = self.graph.bfs_unchecked(v);
        let centers = bfs.within(b - 1);
        let mut tree = OutTree::singleton(v);
        let mut remaining = b;
        let mut iteration = 0;
        while remaining > 0 {
            iteration += 1;
            let (lo, hi) = self.q.window(b, remaining);
            let cond = oracle.condition_unchecked(&tree.vertices());
            let mut best: Option<Candidate> = None;
            for &w in &centers {
                for c in lo..=hi {
                    let sub = self.solve(&cond, c, w, None);
                    let gain = cond.eval(&sub.vertices());
                    if best.as_ref().map_or(true, |inc| inc.beaten_by(gain, c)) {
                        best = Some(Candidate { root: w, size: c, gain, tree: sub });
                    }
                }
            }
            let best = best.expect("centers always contain the root");
            if self.early_stop && best.gain <= 0.0 {
                if let Some(t) = trace.as_deref_mut() {
                    t.stopped_early = true;
                }
                break;
            }
            let path = bfs.path_edges(best.root).expect("centers are reachable");
            tree.graft_in_place(&path).expect("path starts at the root");
            tree.graft_in_place(&best.tree.outward_edges())
                .expect("subtree root is on the grafted path");
            remaining -= best.size;
            if let Some(t) = trace.as_deref_mut() {
                t.iterations.push(IterationRecord {
                    iteration,
                    root: best.root,
                    size_guess: Some(best.size),
                    gain: best.gain,
                    remaining: Some(remaining),
                    window: Some((lo, hi)),
                });
            }
        }
        tree
    }
}

/// Recursive greedy with size constraint `b`, root `v` and size divisor `q`.
pub fn rec_approx(
    graph: &Digraph,
    oracle: &Residual<'_>,
    b: usize,
    v: Vertex,
    q: &SizeDivisor,
    options: RecOptions,
) -> Result<(OutTree, AlgoTrace)> {
    let params = RecParams::new(b, q.clone())?;
    graph.check_vertex(v)?;
    check_ground(graph, oracle)?;
    let start = oracle.query_count();
    let mut trace = AlgoTrace { level: Some(params.level()), ..AlgoTrace::default() };
    let rec = Recursion { graph, q, early_stop: options.early_stop };
    let tree = rec.solve(oracle, b, v, Some(&mut trace));
    trace.oracle_queries = oracle.query_count() - start;
    Ok((tree, trace))
}

/// Depth-`d` recursive greedy: `rec_approx` with `b = k` and `q = k^{1/d}`.
/// For `k = 1` the single-edge base case is exact and runs directly.
pub fn rec_approx_d(
    graph: &Digraph,
    oracle: &Residual<'_>,
    k: usize,
    v: Vertex,
    d: u32,
    options: RecOptions,
) -> Result<(OutTree, AlgoTrace)> {
    if k < 1 {
        return Err(Error::Parameter("size constraint k must be at least 1".into()));
    }
    if d < 1 {
        return Err(Error::Parameter("recursion depth d must be at least 1".into()));
    }
    if k == 1 {
        graph.check_vertex(v)?;
        check_ground(graph, oracle)?;
        let start = oracle.query_count();
        let q = SizeDivisor::integer(2)?;
        let rec = Recursion { graph, q: &q, early_stop: options.early_stop };
        let (tree, _) = rec.base(oracle, v);
        let trace = AlgoTrace {
            level: Some(0),
            oracle_queries: oracle.query_count() - start,
            ..AlgoTrace::default()
        };
        return Ok((tree, trace));
    }
    let q = SizeDivisor::kth_root(k as u64, d)?;
    rec_approx(graph, oracle, k, v, &q, options)
}

pub(crate) fn check_ground(graph: &Digraph, oracle: &Residual<'_>) -> Result<()> {
    if oracle.ground_size() < graph.n() {
        return Err(Error::Parameter(format!(
            "oracle ground set of size {} does not cover {} graph vertices",
            oracle.ground_size(),
            graph.n()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{CoverageFunction, ValueOracle};

    fn path_instance() -> (Digraph, ValueOracle) {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let f = CoverageFunction::new(5, vec![vec![1], vec![2], vec![3, 4]], None).unwrap();
        (g, ValueOracle::new(f))
    }

    #[test]
    fn level_matches_definition() {
        let q = SizeDivisor::kth_root(4, 2).unwrap();
        assert_eq!(q.level(4), 2);
        assert_eq!(q.level(2), 1);
        assert_eq!(q.level(1), 0);
        // q = √3: q^1 < 3 <= q^2 exactly.
        assert_eq!(SizeDivisor::kth_root(3, 2).unwrap().level(3), 2);
        assert_eq!(SizeDivisor::ratio(3, 2).unwrap().level(4), 4);
        assert_eq!(SizeDivisor::integer(4).unwrap().level(4), 1);
        assert_eq!(SizeDivisor::real(2.0).unwrap().level(4), 2);
    }

    #[test]
    fn windows_follow_budget_and_divisor() {
        let q = SizeDivisor::integer(2).unwrap();
        // b/q = 4 < remaining 8: [⌈4/3⌉, 4].
        assert_eq!(q.window(8, 8), (2, 4));
        // remaining 3 < b/q: [1, 3].
        assert_eq!(q.window(8, 3), (1, 3));
        // b <= q: single edges.
        assert_eq!(SizeDivisor::integer(5).unwrap().window(4, 4), (1, 1));
        // b/q = 4/√2 ≈ 2.83 → [1, 2].
        assert_eq!(SizeDivisor::kth_root(2, 2).unwrap().window(4, 4), (1, 2));
        assert_eq!(SizeDivisor::real(1.5).unwrap().window(4, 4), (1, 2));
        assert_eq!(SizeDivisor::ratio(3, 2).unwrap().window(4, 4), (1, 2));
    }

    #[test]
    fn window_is_well_formed_on_a_grid() {
        let divisors = [
            SizeDivisor::ratio(3, 2).unwrap(),
            SizeDivisor::integer(2).unwrap(),
            SizeDivisor::kth_root(7, 3).unwrap(),
            SizeDivisor::real(1.1).unwrap(),
            SizeDivisor::real(9.5).unwrap(),
        ];
        for q in &divisors {
            for b in 1..40 {
                for rem in 1..=b {
                    let (lo, hi) = q.window(b, rem);
                    let x = (b as f64 / q.value()).min(rem as f64).max(1.0);
                    assert!(1 <= lo && lo <= hi && hi <= rem, "{q:?} b={b} rem={rem}");
                    assert!((hi as f64) <= x + 1e-9 && (hi as f64) > x - 1.0 - 1e-9);
                    assert!((3 * lo) as f64 >= x - 1e-9 && (3 * (lo - 1)) as f64 <= x + 1e-9);
                }
            }
        }
    }

    #[test]
    fn divisor_rejects_bad_values() {
        assert!(SizeDivisor::real(1.0).is_err());
        assert!(SizeDivisor::real(f64::NAN).is_err());
        assert!(SizeDivisor::ratio(2, 2).is_err());
        assert!(SizeDivisor::kth_root(1, 3).is_err());
        assert!(SizeDivisor::kth_root(5, 0).is_err());
    }

    #[test]
    fn base_case_takes_the_only_neighbor() {
        let (g, o) = path_instance();
        let (t, _) = rec_approx(&g, &o.view(), 1, 0, &SizeDivisor::integer(2).unwrap(), RecOptions::default()).unwrap();
        assert_eq!(t.vertices(), vec![0, 1]);
        assert_eq!(o.value(&t.vertices()).unwrap(), 2.0);
    }

    #[test]
    fn two_edge_trace() {
        let (g, o) = path_instance();
        let (t, trace) =
            rec_approx(&g, &o.view(), 2, 0, &SizeDivisor::integer(2).unwrap(), RecOptions::faithful()).unwrap();
        assert_eq!(t.vertices(), vec![0, 1, 2]);
        assert_eq!(t.size(), 2);
        assert_eq!(o.value(&t.vertices()).unwrap(), 4.0);
        let first = &trace.iterations[0];
        assert_eq!((first.root, first.size_guess, first.gain), (1, Some(1), 3.0));
        assert_eq!(first.window, Some((1, 1)));
        assert_eq!(trace.iterations[1].gain, 0.0);
        assert_eq!(trace.updates(), 2);
        assert_eq!(trace.level, Some(1));
    }

    #[test]
    fn early_stop_skips_zero_gain_updates() {
        let (g, o) = path_instance();
        let (t, trace) =
            rec_approx(&g, &o.view(), 2, 0, &SizeDivisor::integer(2).unwrap(), RecOptions::default()).unwrap();
        assert_eq!(t.vertices(), vec![0, 1, 2]);
        assert_eq!(trace.updates(), 1);
        assert!(trace.stopped_early);
    }

    #[test]
    fn isolated_root_gives_singleton() {
        let g = Digraph::new(2, [(1, 0)]).unwrap();
        let o = ValueOracle::new(CoverageFunction::new(1, vec![vec![0], vec![]], None).unwrap());
        let (t, _) = rec_approx_d(&g, &o.view(), 1, 0, 1, RecOptions::default()).unwrap();
        assert_eq!(t, OutTree::singleton(0));
        let (t, _) = rec_approx_d(&g, &o.view(), 3, 0, 2, RecOptions::faithful()).unwrap();
        assert_eq!(t, OutTree::singleton(0));
    }

    #[test]
    fn depth_variant_examples() {
        let (g, o) = path_instance();
        let (t, _) = rec_approx_d(&g, &o.view(), 1, 0, 2, RecOptions::default()).unwrap();
        assert_eq!(t.vertices(), vec![0, 1]);
        let (d1, trace_d1) = rec_approx_d(&g, &o.view(), 2, 0, 1, RecOptions::faithful()).unwrap();
        let (direct, trace_direct) =
            rec_approx(&g, &o.view(), 2, 0, &SizeDivisor::integer(2).unwrap(), RecOptions::faithful()).unwrap();
        assert_eq!(d1, direct);
        assert_eq!(trace_d1.iterations, trace_direct.iterations);
    }

    #[test]
    fn parameter_errors() {
        let (g, o) = path_instance();
        let q = SizeDivisor::integer(2).unwrap();
        assert!(matches!(rec_approx(&g, &o.view(), 0, 0, &q, RecOptions::default()), Err(Error::Parameter(_))));
        assert!(matches!(rec_approx(&g, &o.view(), 1, 9, &q, RecOptions::default()), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(rec_approx_d(&g, &o.view(), 2, 0, 0, RecOptions::default()), Err(Error::Parameter(_))));
    }

    #[test]
    fn density_prefers_smaller_size_on_ties() {
        let inc = Candidate { root: 0, size: 2, gain: 4.0, tree: OutTree::singleton(0) };
        // Same density, smaller gain: keep the incumbent.
        assert!(!inc.beaten_by(2.0, 1));
        // Same density, larger gain wins.
        assert!(inc.beaten_by(6.0, 3));
        assert!(inc.beaten_by(3.0, 1));
    }
}

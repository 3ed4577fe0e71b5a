//! Set functions over vertex ids and the counted value oracle the solvers query.
//!
//! A [`ValueOracle`] owns a [`SetFunction`] and a query counter. Solvers never
//! hold the oracle directly; they receive a [`Residual`] view, which is
//! `f(· | Y)` for some conditioning set `Y` (empty for the plain function).
//! Conditioning a view again composes: `residual(residual(f, A), B)` is
//! `f(· | A ∪ B)` and costs one base query per evaluation.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::Vertex;

/// A non-negative set function on `0..ground_size()`.
pub trait SetFunction: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;

    /// `members` holds distinct in-range ids in no particular order.
    fn evaluate(&self, members: &[Vertex]) -> f64;
}

/// Weighted coverage: each vertex covers a subset of `0..universe_size`, and
/// a vertex set is worth the total weight of the elements it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageFunction {
    universe_size: usize,
    sets: Vec<Vec<usize>>,
    weights: Option<Vec<f64>>,
    masks: Vec<FixedBitSet>,
}

impl CoverageFunction {
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>, weights: Option<Vec<f64>>) -> Result<Self> {
        for (v, set) in sets.iter().enumerate() {
            if let Some(&e) = set.iter().find(|&&e| e >= universe_size) {
                return Err(Error::Parameter(format!(
                    "vertex {v} covers element {e} outside universe of size {universe_size}"
                )));
            }
        }
        if let Some(w) = &weights {
            if w.len() != universe_size {
                return Err(Error::Parameter(format!(
                    "expected {universe_size} element weights, got {}",
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::Parameter(format!("element weight {bad} is not a finite non-negative number")));
            }
        }
        let masks = sets
            .iter()
            .map(|set| {
                let mut m = FixedBitSet::with_capacity(universe_size);
                set.iter().for_each(|&e| m.insert(e));
                m
            })
            .collect();
        Ok(Self { universe_size, sets, weights, masks })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.sets.len()
    }

    fn evaluate(&self, members: &[Vertex]) -> f64 {
        let mut covered = FixedBitSet::with_capacity(self.universe_size);
        for &v in members {
            covered.union_with(&self.masks[v]);
        }
        match &self.weights {
            None => covered.count_ones(..) as f64,
            Some(w) => covered.ones().map(|e| w[e]).sum(),
        }
    }
}

/// Modular function: the sum of per-vertex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveFunction {
    weights: Vec<f64>,
}

impl AdditiveFunction {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(bad) = weights.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Parameter(format!("vertex weight {bad} is not a finite non-negative number")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SetFunction for AdditiveFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, members: &[Vertex]) -> f64 {
        members.iter().map(|&v| self.weights[v]).sum()
    }
}

/// Explicit value table indexed by the bitmask of the set (bit `v` set iff
/// `v` is a member). Used for fixtures that need arbitrary, possibly
/// non-submodular, functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFunction {
    n: usize,
    values: Vec<f64>,
}

impl TableFunction {
    pub const MAX_GROUND: usize = 20;

    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > Self::MAX_GROUND {
            return Err(Error::TooLarge(format!(
                "table functions support at most {} vertices, got {n}",
                Self::MAX_GROUND
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::Parameter(format!(
                "table over {n} vertices needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::Parameter(format!("table value {bad} is not finite")));
        }
        Ok(Self { n, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SetFunction for TableFunction {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn evaluate(&self, members: &[Vertex]) -> f64 {
        let mask = members.iter().fold(0usize, |m, &v| m | (1 << v));
        self.values[mask]
    }
}

/// A set function behind a query counter.
pub struct ValueOracle {
    func: Box<dyn SetFunction>,
    queries: AtomicU64,
}

impl fmt::Debug for ValueOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueOracle")
            .field("func", &self.func)
            .field("queries", &self.query_count())
            .finish()
    }
}

impl ValueOracle {
    pub fn new(func: impl SetFunction + 'static) -> Self {
        Self::from_boxed(Box::new(func))
    }

    pub fn from_boxed(func: Box<dyn SetFunction>) -> Self {
        Self { func, queries: AtomicU64::new(0) }
    }

    pub fn ground_size(&self) -> usize {
        self.func.ground_size()
    }

    pub fn function(&self) -> &dyn SetFunction {
        self.func.as_ref()
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    fn raw(&self, members: &[Vertex]) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.func.evaluate(members)
    }

    /// The unconditioned function as a view.
    pub fn view(&self) -> Residual<'_> {
        Residual {
            base: self,
            cond: FixedBitSet::with_capacity(self.ground_size()),
            cond_list: Vec::new(),
            offset: 0.0,
            conditioned: false,
        }
    }

    pub fn value(&self, set: &[Vertex]) -> Result<f64> {
        self.view().value(set)
    }

    /// `f(X | Y) = f(X ∪ Y) − f(Y)`; two queries.
    pub fn marginal(&self, x: &[Vertex], y: &[Vertex]) -> Result<f64> {
        self.view().marginal(x, y)
    }

    pub fn residual(&self, y: &[Vertex]) -> Result<Residual<'_>> {
        self.view().residual(y)
    }
}

/// `f(· | Y)` over a shared [`ValueOracle`]. Evaluations are charged to the
/// base oracle's counter.
#[derive(Clone)]
pub struct Residual<'a> {
    base: &'a ValueOracle,
    cond: FixedBitSet,
    cond_list: Vec<Vertex>,
    offset: f64,
    conditioned: bool,
}

impl fmt::Debug for Residual<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Residual")
            .field("conditioning", &self.cond_list)
            .field("offset", &self.offset)
            .finish()
    }
}

impl<'a> Residual<'a> {
    pub fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    pub fn base(&self) -> &'a ValueOracle {
        self.base
    }

    pub fn query_count(&self) -> u64 {
        self.base.query_count()
    }

    /// The conditioning set `Y`, sorted.
    pub fn conditioning(&self) -> &[Vertex] {
        &self.cond_list
    }

    fn normalize(&self, set: &[Vertex]) -> Result<Vec<Vertex>> {
        let n = self.ground_size();
        if let Some(&v) = set.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        Ok(s)
    }

    pub fn value(&self, set: &[Vertex]) -> Result<f64> {
        let s = self.normalize(set)?;
        Ok(self.eval(&s))
    }

    /// Evaluation without range checks; `set` must hold distinct in-range ids.
    pub(crate) fn eval(&self, set: &[Vertex]) -> f64 {
        if !self.conditioned {
            return self.base.raw(set);
        }
        let mut members = self.cond_list.clone();
        members.extend(set.iter().copied().filter(|&v| !self.cond.contains(v)));
        (self.base.raw(&members) - self.offset).max(0.0)
    }

    pub fn marginal(&self, x: &[Vertex], y: &[Vertex]) -> Result<f64> {
        let x = self.normalize(x)?;
        let y = self.normalize(y)?;
        let mut xy = x;
        xy.extend_from_slice(&y);
        xy.sort_unstable();
        xy.dedup();
        Ok(self.eval(&xy) - self.eval(&y))
    }

    /// Conditions this view further on `y`; one base query to fix `f(Y)`.
    pub fn residual(&self, y: &[Vertex]) -> Result<Residual<'a>> {
        let y = self.normalize(y)?;
        Ok(self.condition_unchecked(&y))
    }

    pub(crate) fn condition_unchecked(&self, y: &[Vertex]) -> Residual<'a> {
        let mut cond = self.cond.clone();
        for &v in y {
            cond.insert(v);
        }
        let cond_list: Vec<Vertex> = cond.ones().collect();
        let offset = self.base.raw(&cond_list);
        Residual { base: self.base, cond, cond_list, offset, conditioned: true }
    }
}

/// Outcome of exhaustively checking the three properties the solvers assume.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub nonnegative: bool,
    pub monotone: bool,
    pub submodular: bool,
    pub violations: Vec<Violation>,
}

impl OracleReport {
    pub fn is_valid(&self) -> bool {
        self.nonnegative && self.monotone && self.submodular
    }
}

/// First witness found for a failed property.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Negative { set: Vec<Vertex>, value: f64 },
    NotMonotone { smaller: Vec<Vertex>, larger: Vec<Vertex> },
    /// `f(v | x) < f(v | y)` with `x ⊆ y`, `v ∉ y`.
    NotSubmodular { x: Vec<Vertex>, y: Vec<Vertex>, v: Vertex },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Negative { set, value } => write!(f, "f({set:?}) = {value} < 0"),
            Violation::NotMonotone { smaller, larger } => {
                write!(f, "f({smaller:?}) > f({larger:?}) although {smaller:?} ⊆ {larger:?}")
            }
            Violation::NotSubmodular { x, y, v } => {
                write!(f, "f({v} | {x:?}) < f({v} | {y:?}) although {x:?} ⊆ {y:?}")
            }
        }
    }
}

pub const VERIFY_MAX_GROUND: usize = 16;

const VERIFY_TOL: f64 = 1e-9;

fn mask_members(mask: usize, n: usize) -> Vec<Vertex> {
    (0..n).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Checks non-negativity, monotonicity and diminishing returns over all
/// `2^n` subsets of the first `n` vertices.
///
/// Diminishing returns is checked on adjacent pairs `X ⊆ X + u`, which is
/// equivalent to checking every `X ⊆ Y`.
pub fn verify_oracle(oracle: &Residual<'_>, n: usize) -> Result<OracleReport> {
    if n > VERIFY_MAX_GROUND {
        return Err(Error::TooLarge(format!(
            "verification enumerates 2^n subsets; n = {n} exceeds {VERIFY_MAX_GROUND}"
        )));
    }
    if n > oracle.ground_size() {
        return Err(Error::Parameter(format!(
            "n = {n} exceeds the oracle's ground set of size {}",
            oracle.ground_size()
        )));
    }
    let table: Vec<f64> = (0..1usize << n).map(|m| oracle.eval(&mask_members(m, n))).collect();
    let mut violations = Vec::new();

    let negative = table.iter().position(|&x| x < -VERIFY_TOL);
    if let Some(m) = negative {
        violations.push(Violation::Negative { set: mask_members(m, n), value: table[m] });
    }

    let mut monotone = true;
    'mono: for m in 0..1usize << n {
        for v in (0..n).filter(|v| m & (1 << v) == 0) {
            if table[m | (1 << v)] < table[m] - VERIFY_TOL {
                violations.push(Violation::NotMonotone {
                    smaller: mask_members(m, n),
                    larger: mask_members(m | (1 << v), n),
                });
                monotone = false;
                break 'mono;
            }
        }
    }

    let mut submodular = true;
    'sub: for m in 0..1usize << n {
        for v in (0..n).filter(|v| m & (1 << v) == 0) {
            let gain_small = table[m | (1 << v)] - table[m];
            for u in (0..n).filter(|&u| u != v && m & (1 << u) == 0) {
                let y = m | (1 << u);
                let gain_large = table[y | (1 << v)] - table[y];
                if gain_small < gain_large - VERIFY_TOL {
                    violations.push(Violation::NotSubmodular {
                        x: mask_members(m, n),
                        y: mask_members(y, n),
                        v,
                    });
                    submodular = false;
                    break 'sub;
                }
            }
        }
    }

    Ok(OracleReport { nonnegative: negative.is_none(), monotone, submodular, violations })
}

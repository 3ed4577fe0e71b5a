//! Seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Objective};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    /// Every ordered (directed) or unordered pair independently with probability `p`.
    Erdos { p: f64 },
    Path,
    /// Edges from vertex 0 to every other vertex.
    Star,
    /// Row-major grid `⌈√n⌉` wide; edges point right and down when directed.
    Grid,
    /// Vertex `i > 0` hangs below a uniform earlier vertex.
    RandomOutTree,
}

impl GraphModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Erdos { .. } => "erdos",
            Self::Path => "path",
            Self::Star => "star",
            Self::Grid => "grid",
            Self::RandomOutTree => "random-out-tree",
        }
    }
}

impl fmt::Display for GraphModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Erdos { p } => write!(f, "erdos:{p}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses `path`, `star`, `grid`, `random-out-tree` or `erdos:P`.
impl FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "path" => Self::Path,
            "star" => Self::Star,
            "grid" => Self::Grid,
            "random-out-tree" => Self::RandomOutTree,
            _ => match s.strip_prefix("erdos:").map(str::parse::<f64>) {
                Some(Ok(p)) => Self::Erdos { p },
                _ => return Err(Error::Parameter(format!("unknown graph model {s:?}"))),
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveSpec {
    /// Each vertex covers a uniform number in `0..=max_set` of distinct
    /// elements; with `weighted`, elements get integer weights in `1..=3`.
    Coverage { universe_size: usize, max_set: usize, weighted: bool },
    /// Integer vertex weights in `0..=max_weight`.
    Additive { max_weight: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub model: GraphModel,
    pub n: usize,
    pub directed: bool,
    pub objective: ObjectiveSpec,
    pub k: usize,
    pub root: Option<usize>,
    pub seed: u64,
}

fn edges(model: GraphModel, n: usize, directed: bool, rng: &mut ChaCha8Rng) -> Result<Vec<[usize; 2]>> {
    Ok(match model {
        GraphModel::Erdos { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("edge probability p = {p} must lie in [0, 1]")));
            }
            let mut out = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && (directed || u < v) && rng.gen_bool(p) {
                        out.push([u, v]);
                    }
                }
            }
            out
        }
        GraphModel::Path => (1..n).map(|i| [i - 1, i]).collect(),
        GraphModel::Star => (1..n).map(|i| [0, i]).collect(),
        GraphModel::Grid => {
            let width = (1..=n).find(|w| w * w >= n).unwrap_or(1);
            let mut out = Vec::new();
            for v in 0..n {
                if (v + 1) % width != 0 && v + 1 < n {
                    out.push([v, v + 1]);
                }
                if v + width < n {
                    out.push([v, v + width]);
                }
            }
            out
        }
        GraphModel::RandomOutTree => (1..n).map(|i| [rng.gen_range(0..i), i]).collect(),
    })
}

fn objective(spec: ObjectiveSpec, n: usize, rng: &mut ChaCha8Rng) -> Result<Objective> {
    Ok(match spec {
        ObjectiveSpec::Coverage { universe_size, max_set, weighted } => {
            if max_set > universe_size {
                return Err(Error::Parameter(format!(
                    "set size {max_set} exceeds universe size {universe_size}"
                )));
            }
            let sets = (0..n)
                .map(|_| {
                    let size = rng.gen_range(0..=max_set);
                    let mut s = sample(rng, universe_size, size).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            let weights = weighted.then(|| (0..universe_size).map(|_| rng.gen_range(1..=3) as f64).collect());
            Objective::Coverage { universe_size, sets, weights }
        }
        ObjectiveSpec::Additive { max_weight } => {
            Objective::Additive { weights: (0..n).map(|_| rng.gen_range(0..=max_weight) as f64).collect() }
        }
    })
}

/// Deterministic in `spec`: the same seed gives the same instance.
pub fn gen_random(spec: &GenSpec) -> Result<Instance> {
    if spec.n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if spec.k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if let Some(r) = spec.root.filter(|&r| r >= spec.n) {
        return Err(Error::VertexOutOfRange { vertex: r, n: spec.n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = edges(spec.model, spec.n, spec.directed, &mut rng)?;
    let objective = objective(spec.objective, spec.n, &mut rng)?;
    Ok(Instance { directed: spec.directed, n: spec.n, edges, objective, k: spec.k, root: spec.root })
}

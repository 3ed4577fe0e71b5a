//! Fixed instances shared by the benchmarks.

use arbormax::{gen_random, GenSpec, GraphModel, Instance, ObjectiveSpec};

/// Directed Erdős–Rényi instance with a coverage objective rooted at 0.
pub fn erdos(n: usize, k: usize, seed: u64) -> Instance {
    gen_random(&GenSpec {
        model: GraphModel::Erdos { p: 0.25 },
        n,
        directed: true,
        objective: ObjectiveSpec::Coverage { universe_size: 4 * n, max_set: 4, weighted: true },
        k,
        root: Some(0),
        seed,
    })
    .expect("valid spec")
}

/// Random out-tree on `n` vertices with additive weights.
pub fn out_tree(n: usize, seed: u64) -> Instance {
    gen_random(&GenSpec {
        model: GraphModel::RandomOutTree,
        n,
        directed: true,
        objective: ObjectiveSpec::Additive { max_weight: 9 },
        k: n - 1,
        root: Some(0),
        seed,
    })
    .expect("valid spec")
}

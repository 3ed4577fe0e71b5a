#![allow(dead_code)]

use arbormax::exact::{exact_dcsm, exact_drcsm, EnumerationCap};
use arbormax::{gen_random, Digraph, GenSpec, GraphModel, Instance, ObjectiveSpec, OutTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: usize = 210;

/// Seeded directed coverage instances with `n <= 9` and `k <= 4`.
pub fn corpus_instance(i: usize) -> Instance {
    let models = [
        GraphModel::Erdos { p: 0.3 },
        GraphModel::RandomOutTree,
        GraphModel::Erdos { p: 0.5 },
        GraphModel::Grid,
        GraphModel::Erdos { p: 0.2 },
        GraphModel::Path,
        GraphModel::Star,
    ];
    let model = models[i % models.len()];
    let n = 4 + i % 6;
    let root = match model {
        GraphModel::Erdos { .. } => i % n,
        _ => 0,
    };
    gen_random(&GenSpec {
        model,
        n,
        directed: true,
        objective: ObjectiveSpec::Coverage { universe_size: 10, max_set: 3, weighted: i % 3 == 0 },
        k: 1 + (i / 6) % 4,
        root: Some(root),
        seed: 1000 + i as u64,
    })
    .unwrap()
}

/// A corpus instance together with its exact optima.
pub struct Case {
    pub name: String,
    pub inst: Instance,
    pub g: Digraph,
    pub root: usize,
    pub k: usize,
    /// Rooted optimum with at most `k` edges.
    pub opt_rooted: f64,
    /// `opt_by_height[r]`: rooted optimum with height at most `r`.
    pub opt_by_height: Vec<f64>,
    /// Unrooted optimum and its height.
    pub opt_any: f64,
    pub r_star: usize,
}

pub fn corpus() -> Vec<Case> {
    (0..CORPUS_SIZE)
        .map(|i| {
            let inst = corpus_instance(i);
            let g = inst.graph().unwrap();
            let o = inst.to_oracle().unwrap();
            let cap = EnumerationCap::default();
            let (k, root) = (inst.k, inst.root.unwrap());
            let opt_rooted = exact_drcsm(&g, &o.view(), k, root, None, cap).unwrap().value;
            let opt_by_height = (0..=k)
                .map(|r| exact_drcsm(&g, &o.view(), k, root, Some(r), cap).unwrap().value)
                .collect();
            let any = exact_dcsm(&g, &o.view(), k, cap).unwrap();
            Case {
                name: format!("corpus-{i:03}"),
                g,
                root,
                k,
                opt_rooted,
                opt_by_height,
                opt_any: any.value,
                r_star: any.height,
                inst,
            }
        })
        .collect()
}

/// Random out-tree with `m` edges on vertices `0..=m`, rooted at 0, with a
/// mix of deep and bushy shapes.
pub fn random_out_tree(m: usize, rng: &mut ChaCha8Rng) -> OutTree {
    let window = match rng.gen_range(0..3) {
        0 => 1,
        1 => 3,
        _ => usize::MAX,
    };
    let edges = (1..=m).map(|c| {
        let lo = c.saturating_sub(window);
        (rng.gen_range(lo..c), c)
    });
    OutTree::from_edges(0, edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

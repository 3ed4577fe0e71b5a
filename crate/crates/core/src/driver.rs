//! Instance-level entry points shared by the command line and benchmarks.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exact_csm, exact_dcsm, exact_drcsm, EnumerationCap, ExactResult};
use crate::greedy_radius::{greedy_radius, rec_approx_d_guarantee};
use crate::instance::Instance;
use crate::recapprox::{rec_approx_d, RecOptions};
use crate::reductions::{
    epsilon_factor, sharp_factor, solve_csm, solve_dcsm, solve_drcsm_bicriteria, SolveParams, SubroutineKind,
};
use crate::report::{
    Bounds, ExactFields, ExactReport, Feasibility, QueryCounts, ReportParams, SolutionTree, SolveReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    GreedyRadius,
    RecapproxD,
    Csm,
    Dcsm,
    Drcsm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Self::GreedyRadius, Self::RecapproxD, Self::Csm, Self::Dcsm, Self::Drcsm];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::GreedyRadius => "greedy-radius",
            Self::RecapproxD => "recapprox-d",
            Self::Csm => "csm",
            Self::Dcsm => "dcsm",
            Self::Drcsm => "drcsm",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub algorithm: Algorithm,
    pub d: u32,
    pub delta: Option<f64>,
    /// Overrides the instance root.
    pub root: Option<usize>,
    pub radius: Option<usize>,
    pub subroutine: SubroutineKind,
    pub faithful: bool,
    pub lazy: bool,
    /// Also run the exact solver and report the realized ratio.
    pub with_exact: bool,
    pub cap: EnumerationCap,
}

impl RunOptions {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            d: 1,
            delta: None,
            root: None,
            radius: None,
            subroutine: SubroutineKind::RecapproxD,
            faithful: false,
            lazy: false,
            with_exact: false,
            cap: EnumerationCap::default(),
        }
    }

    fn params(&self, root: Option<usize>) -> SolveParams {
        SolveParams {
            d: self.d,
            delta: self.delta,
            root,
            radius: self.radius,
            subroutine: self.subroutine,
            faithful: self.faithful,
            lazy: self.lazy,
            cap: self.cap,
        }
    }
}

struct Run {
    tree: crate::graph::OutTree,
    queries: QueryCounts,
    trace: Option<crate::trace::AlgoTrace>,
    size_limit: f64,
    within_violation: Option<bool>,
    radius: Option<usize>,
    delta: Option<f64>,
}

/// Guaranteed value factor and its ε-form, given the optimum's radius `r`.
fn value_factors(opts: &RunOptions, delta: f64, r: usize) -> (f64, Option<f64>) {
    let r = r.max(1);
    match (opts.algorithm, opts.subroutine) {
        (Algorithm::RecapproxD, _) => (1.0 / (opts.d + 1) as f64, None),
        (Algorithm::GreedyRadius, SubroutineKind::Exact) => (0.5, None),
        (Algorithm::GreedyRadius, SubroutineKind::RecapproxD) => (0.5 / (opts.d + 1) as f64, None),
        (_, SubroutineKind::Exact) => (delta / 16.0, None),
        (_, SubroutineKind::RecapproxD) => {
            (delta * sharp_factor(opts.d, r), Some(delta * epsilon_factor(1.0 / opts.d as f64, r)))
        }
    }
}

fn need_root(root: Option<usize>, algo: Algorithm) -> Result<usize> {
    root.ok_or_else(|| Error::Parameter(format!("{algo} needs a root (instance field or --root)")))
}

fn execute(inst: &Instance, opts: &RunOptions) -> Result<(Run, crate::oracle::ValueOracle)> {
    let g = inst.graph()?;
    let oracle = inst.to_oracle()?;
    let view = oracle.view();
    let k = inst.k;
    let root = opts.root.or(inst.root);
    let run = match opts.algorithm {
        Algorithm::GreedyRadius => {
            let v = need_root(root, opts.algorithm)?;
            let r = opts.radius.unwrap_or(k);
            let params = opts.params(Some(v));
            let sub = params.subroutine();
            let greedy = crate::greedy_radius::GreedyOptions { early_stop: !opts.faithful, lazy: opts.lazy };
            let (tree, trace) = greedy_radius(&g, &view, k, v, r, sub.as_ref(), greedy)?;
            let beta = sub.guarantee(r).map_or(f64::INFINITY, |gu| gu.beta);
            Run {
                tree,
                queries: QueryCounts { total: trace.oracle_queries, per_guess: Vec::new() },
                trace: Some(trace),
                size_limit: 4.0 * beta * k as f64,
                within_violation: None,
                radius: Some(r),
                delta: None,
            }
        }
        Algorithm::RecapproxD => {
            let v = need_root(root, opts.algorithm)?;
            let options = if opts.faithful { RecOptions::faithful() } else { RecOptions::default() };
            let (tree, trace) = rec_approx_d(&g, &view, k, v, opts.d, options)?;
            Run {
                tree,
                queries: QueryCounts { total: trace.oracle_queries, per_guess: Vec::new() },
                trace: Some(trace),
                size_limit: rec_approx_d_guarantee(opts.d, k).beta * k as f64,
                within_violation: None,
                radius: None,
                delta: None,
            }
        }
        Algorithm::Dcsm | Algorithm::Csm => {
            let params = opts.params(opts.root);
            let out = if opts.algorithm == Algorithm::Csm {
                if inst.directed {
                    return Err(Error::Parameter("csm needs an undirected instance".into()));
                }
                solve_csm(&g, &view, k, &params)?
            } else {
                solve_dcsm(&g, &view, k, &params)?
            };
            let radius = Some(out.best().radius);
            Run {
                tree: out.tree,
                queries: QueryCounts { total: out.total_queries, per_guess: out.guesses },
                trace: None,
                size_limit: k as f64,
                within_violation: None,
                radius,
                delta: None,
            }
        }
        Algorithm::Drcsm => {
            let v = need_root(root, opts.algorithm)?;
            let delta = opts.delta.unwrap_or(1.0);
            let out = solve_drcsm_bicriteria(&g, &view, k, v, delta, &opts.params(Some(v)))?;
            let limit = (1.0 + delta) * k as f64;
            let radius = Some(out.best().radius);
            Run {
                within_violation: Some(out.tree.size() as f64 <= limit + 1e-9),
                tree: out.tree,
                queries: QueryCounts { total: out.total_queries, per_guess: out.guesses },
                trace: None,
                size_limit: limit,
                radius,
                delta: Some(delta),
            }
        }
    };
    run.tree.check_in(&g)?;
    Ok((run, oracle))
}

/// Exact optimum for the problem an algorithm targets.
pub fn exact_for(inst: &Instance, opts: &RunOptions) -> Result<ExactResult> {
    let g = inst.graph()?;
    let oracle = inst.to_oracle()?;
    let view = oracle.view();
    let k = inst.k;
    let root = opts.root.or(inst.root);
    match opts.algorithm {
        Algorithm::GreedyRadius => {
            let v = need_root(root, opts.algorithm)?;
            exact_drcsm(&g, &view, k, v, Some(opts.radius.unwrap_or(k)), opts.cap)
        }
        Algorithm::RecapproxD | Algorithm::Drcsm => {
            exact_drcsm(&g, &view, k, need_root(root, opts.algorithm)?, None, opts.cap)
        }
        Algorithm::Dcsm => exact_dcsm(&g, &view, k, opts.cap),
        Algorithm::Csm => exact_csm(&g, &view, k, opts.cap),
    }
}

pub fn run_solve(inst: &Instance, opts: &RunOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let (run, oracle) = execute(inst, opts)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let k = inst.k;
    let value = oracle.value(&run.tree.vertices())?;
    let size = run.tree.size();

    let exact = if opts.with_exact {
        let e = exact_for(inst, opts)?;
        let ratio = if e.value > 0.0 { value / e.value } else { 1.0 };
        Some(ExactFields { opt: e.value, r_star: e.height, ratio })
    } else {
        None
    };
    let radius_used = match (opts.algorithm, &exact) {
        (Algorithm::GreedyRadius | Algorithm::RecapproxD, _) => None,
        (_, Some(e)) => Some(e.r_star),
        (Algorithm::Csm, None) => Some(opts.radius.unwrap_or(k.div_ceil(2))),
        (_, None) => Some(opts.radius.unwrap_or(k)),
    };
    let (value_factor, eps) = value_factors(opts, run.delta.unwrap_or(1.0), radius_used.unwrap_or(1));
    let uses_sub = matches!(opts.algorithm, Algorithm::GreedyRadius | Algorithm::Csm | Algorithm::Dcsm | Algorithm::Drcsm);
    let uses_d = opts.algorithm == Algorithm::RecapproxD || opts.subroutine == SubroutineKind::RecapproxD;

    Ok(SolveReport {
        algorithm: opts.algorithm.as_str().into(),
        params: ReportParams {
            k,
            d: uses_d.then_some(opts.d),
            q: (opts.algorithm == Algorithm::RecapproxD && k > 1).then(|| (k as f64).powf(1.0 / opts.d as f64)),
            delta: run.delta,
            radius: run.radius,
            root: matches!(opts.algorithm, Algorithm::GreedyRadius | Algorithm::RecapproxD | Algorithm::Drcsm)
                .then(|| run.tree.root())
                .or(opts.root),
            subroutine: uses_sub.then(|| opts.subroutine.as_str().into()),
            faithful: opts.faithful,
        },
        solution: SolutionTree::from(&run.tree),
        value,
        size,
        feasibility: Feasibility {
            within_k: size <= k,
            within_violation: run.within_violation,
            size_limit: run.size_limit,
            feasible: size as f64 <= run.size_limit + 1e-9,
        },
        oracle_queries: run.queries,
        wall_time_ms,
        trace: run.trace,
        exact,
        bounds: Bounds { value_factor, epsilon_factor: eps, radius_used },
    })
}

/// Exact optimum of the instance's own problem: rooted when it names a
/// root, otherwise directed or undirected by its `directed` flag.
pub fn run_exact(inst: &Instance, height_cap: Option<usize>, cap: EnumerationCap) -> Result<ExactReport> {
    let start = Instant::now();
    let g = inst.graph()?;
    let oracle = inst.to_oracle()?;
    let view = oracle.view();
    let (problem, result) = match inst.root {
        Some(v) => ("drcsm", exact_drcsm(&g, &view, inst.k, v, height_cap, cap)?),
        None if height_cap.is_some() => {
            return Err(Error::Parameter("--height-cap needs a rooted instance".into()));
        }
        None if inst.directed => ("dcsm", exact_dcsm(&g, &view, inst.k, cap)?),
        None => ("csm", exact_csm(&g, &view, inst.k, cap)?),
    };
    Ok(ExactReport {
        problem: problem.into(),
        k: inst.k,
        height_cap,
        solution: SolutionTree::from(&result.tree),
        value: result.value,
        size: result.tree.size(),
        r_star: result.height,
        enumerated: result.enumerated,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// One CSV row of the `bench` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub k: usize,
    pub value: f64,
    pub opt: f64,
    pub ratio: f64,
    pub bound: f64,
    pub size: usize,
    pub size_limit: f64,
    /// `m / k`.
    pub violation: f64,
    pub queries: u64,
    pub ok: bool,
}

pub fn bench_row(name: &str, inst: &Instance, opts: &RunOptions) -> Result<BenchRow> {
    let opts = RunOptions { with_exact: true, ..opts.clone() };
    let report = run_solve(inst, &opts)?;
    let exact = report.exact.as_ref().expect("exact requested");
    Ok(BenchRow {
        instance: name.into(),
        algorithm: report.algorithm.clone(),
        n: inst.n,
        k: inst.k,
        value: report.value,
        opt: exact.opt,
        ratio: exact.ratio,
        bound: report.bounds.value_factor,
        size: report.size,
        size_limit: report.feasibility.size_limit,
        violation: report.size as f64 / inst.k as f64,
        queries: report.oracle_queries.total,
        ok: report.feasibility.feasible && exact.ratio >= report.bounds.value_factor - 1e-12,
    })
}

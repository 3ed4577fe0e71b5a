use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arbormax::driver::bench_row;
use arbormax::instance::emit_json;
use arbormax::{
    emit_instance, emit_report, gen_random, parse_instance, run_exact, run_solve, verify_oracle, Algorithm,
    EnumerationCap, Error, GenSpec, GraphModel, Instance, ObjectiveSpec, RunOptions, SubroutineKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Largest instance `check` verifies exhaustively.
const CHECK_MAX_N: usize = 12;

#[derive(Parser)]
#[command(name = "arbormax", version, about = "Connected submodular maximization solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an approximation algorithm and write a JSON report.
    Solve(SolveArgs),
    /// Solve an instance exactly by enumeration.
    Exact(ExactArgs),
    /// Generate seeded random instances.
    Gen(GenArgs),
    /// Validate an instance and verify its objective on small ground sets.
    Check {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Solve every instance in a directory and compare against the optimum.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    GreedyRadius,
    RecapproxD,
    Csm,
    Dcsm,
    Drcsm,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::GreedyRadius => Algorithm::GreedyRadius,
            AlgoArg::RecapproxD => Algorithm::RecapproxD,
            AlgoArg::Csm => Algorithm::Csm,
            AlgoArg::Dcsm => Algorithm::Dcsm,
            AlgoArg::Drcsm => Algorithm::Drcsm,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SubroutineArg {
    RecapproxD,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Coverage,
    Additive,
}

#[derive(Args)]
struct SolverFlags {
    /// Recursion depth of the recursive greedy.
    #[arg(long, default_value_t = 1)]
    d: u32,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    root: Option<usize>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, value_enum, default_value = "recapprox-d")]
    subroutine: SubroutineArg,
    /// Disable the zero-gain early stop.
    #[arg(long)]
    faithful: bool,
    /// Lazy marginal evaluation in the greedy loop.
    #[arg(long)]
    lazy: bool,
}

impl SolverFlags {
    fn options(&self, algorithm: Algorithm, cap: EnumerationCap) -> RunOptions {
        RunOptions {
            d: self.d,
            delta: self.delta,
            root: self.root,
            radius: self.radius,
            subroutine: match self.subroutine {
                SubroutineArg::RecapproxD => SubroutineKind::RecapproxD,
                SubroutineArg::Exact => SubroutineKind::Exact,
            },
            faithful: self.faithful,
            lazy: self.lazy,
            cap,
            ..RunOptions::new(algorithm)
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[command(flatten)]
    flags: SolverFlags,
    /// Also compute the optimum and the achieved ratio.
    #[arg(long)]
    exact: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Only consider trees of at most this height below the root.
    #[arg(long)]
    height_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// path, star, grid, random-out-tree or erdos:P
    #[arg(long)]
    model: GraphModel,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    root: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "coverage")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 10)]
    universe: usize,
    #[arg(long, default_value_t = 3)]
    max_set: usize,
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 5)]
    max_weight: u32,
    /// Write this many instances, seeds `seed..seed+count`, into the directory `--out`.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    /// Algorithm for every instance; by default drcsm for rooted
    /// instances, else dcsm or csm by the directed flag.
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    #[command(flatten)]
    flags: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Failed(format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> CliResult<Instance> {
    let bytes = fs::read(path).map_err(|e| io_fail(path, e))?;
    parse_instance(&bytes).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| io_fail(p, e)),
        None => io::stdout().write_all(bytes).map_err(|e| Failure::Failed(e.to_string())),
    }
}

fn solve(args: SolveArgs, cap: EnumerationCap) -> CliResult<bool> {
    let inst = load(&args.instance)?;
    let opts = RunOptions { with_exact: args.exact, ..args.flags.options(args.algo.into(), cap) };
    let report = run_solve(&inst, &opts)?;
    write_out(args.out.as_deref(), &emit_report(&report))?;
    if !report.feasibility.feasible {
        eprintln!("solution size {} exceeds the limit {}", report.size, report.feasibility.size_limit);
    }
    Ok(report.feasibility.feasible)
}

fn exact(args: ExactArgs, cap: EnumerationCap) -> CliResult<bool> {
    let inst = load(&args.instance)?;
    let report = run_exact(&inst, args.height_cap, cap)?;
    write_out(args.out.as_deref(), &emit_json(&report))?;
    Ok(true)
}

fn gen(args: GenArgs) -> CliResult<bool> {
    let objective = match args.objective {
        ObjectiveArg::Coverage => {
            ObjectiveSpec::Coverage { universe_size: args.universe, max_set: args.max_set, weighted: args.weighted }
        }
        ObjectiveArg::Additive => ObjectiveSpec::Additive { max_weight: args.max_weight },
    };
    let spec = |seed| GenSpec {
        model: args.model,
        n: args.n,
        directed: args.directed,
        objective,
        k: args.k,
        root: args.root,
        seed,
    };
    match args.count {
        None => write_out(args.out.as_deref(), &emit_instance(&gen_random(&spec(args.seed))?))?,
        Some(count) => {
            let dir = args.out.ok_or_else(|| Failure::Usage("--count needs --out DIR".into()))?;
            fs::create_dir_all(&dir).map_err(|e| io_fail(&dir, e))?;
            for i in 0..count as u64 {
                let path = dir.join(format!("inst_{i:04}.json"));
                let bytes = emit_instance(&gen_random(&spec(args.seed + i))?);
                fs::write(&path, bytes).map_err(|e| io_fail(&path, e))?;
            }
        }
    }
    Ok(true)
}

fn check(path: &Path) -> CliResult<bool> {
    let inst = load(path)?;
    if inst.n > CHECK_MAX_N {
        println!("instance valid; oracle check skipped (n = {} > {CHECK_MAX_N})", inst.n);
        return Ok(true);
    }
    let oracle = inst.to_oracle()?;
    let report = verify_oracle(&oracle.view(), inst.n)?;
    println!(
        "nonnegative: {}\nmonotone: {}\nsubmodular: {}",
        report.nonnegative, report.monotone, report.submodular
    );
    for v in &report.violations {
        println!("witness: {v}");
    }
    Ok(report.is_valid())
}

fn bench(args: BenchArgs, cap: EnumerationCap) -> CliResult<bool> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .map_err(|e| io_fail(&args.dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| io_fail(p, e))?),
        None => Box::new(io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    let mut all_ok = true;
    for path in &files {
        let inst = load(path)?;
        let algo = args.algo.map(Algorithm::from).unwrap_or(match (inst.root, inst.directed) {
            (Some(_), _) => Algorithm::Drcsm,
            (None, true) => Algorithm::Dcsm,
            (None, false) => Algorithm::Csm,
        });
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let row = bench_row(&name, &inst, &args.flags.options(algo, cap)).map_err(|e| match e {
            Error::Parameter(m) => Failure::Usage(format!("{name}: {m}")),
            other => Failure::Failed(format!("{name}: {other}")),
        })?;
        all_ok &= row.ok;
        csv.serialize(&row).map_err(|e| Failure::Failed(e.to_string()))?;
    }
    csv.flush().map_err(|e| Failure::Failed(e.to_string()))?;
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = match EnumerationCap::from_env() {
        Ok(cap) => cap,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a, cap),
        Command::Exact(a) => exact(a, cap),
        Command::Gen(a) => gen(a),
        Command::Check { instance } => check(&instance),
        Command::Bench(a) => bench(a, cap),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

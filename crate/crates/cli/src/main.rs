//! `divmax` command-line tool: coreset construction, solving, auditing,
//! synthetic data generation and benchmark sweeps.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divmax::coreset::{
    default_parallelism, parallel_coreset, seq_coreset, size_bound, Coreset, CoresetStop, StreamMode,
    StreamState,
};
use divmax::diversity::{evaluate, DiversityKind};
use divmax::io::{ingest, load_matroid, write_matroid_config, write_points, PointReader};
use divmax::run::{bench, bench_table, run, BenchConfig, RunConfig};
use divmax::solvers::{Pipeline, SolveConfig, SolverKind, DEFAULT_BUDGET};
use divmax::synth::{generate, SynthMatroid, SynthSpec};
use divmax::{Dataset, Error, MetricKind, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "divmax", version, about = "Diversity maximization under matroid constraints via coresets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequential coreset (farthest-first clustering plus per-cluster extraction).
    CoresetSeq(CoresetArgs),
    /// One-pass streaming coreset; the point file is read line by line.
    CoresetStream(StreamArgs),
    /// Union of per-shard coresets built concurrently.
    CoresetParallel(CoresetArgs),
    /// Coreset plus final solver, repeated over seeded permutations.
    Solve(SolveArgs),
    /// Brute-force audit: optimum of the instance and, optionally, a check of a solution.
    Verify(VerifyArgs),
    /// Write a synthetic point file and matroid file.
    Gen(GenArgs),
    /// Quality-versus-tau sweep and parallel construction timing.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Input {
    /// JSON-lines point file.
    #[arg(long)]
    input: PathBuf,
    /// JSON matroid configuration.
    #[arg(long)]
    matroid: PathBuf,
    #[arg(long, default_value = "angular-cosine")]
    metric: MetricKind,
    /// Solution size.
    #[arg(long)]
    k: usize,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Stop {
    /// Coreset accuracy in (0, 1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of clusters.
    #[arg(long)]
    tau: Option<usize>,
}

impl Stop {
    fn get(&self) -> CoresetStop {
        match (self.epsilon, self.tau) {
            (Some(e), _) => CoresetStop::Epsilon(e),
            (_, Some(t)) => CoresetStop::Tau(t),
            _ => unreachable!("clap enforces one of --epsilon / --tau"),
        }
    }
}

#[derive(Args)]
struct CoresetArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    stop: Stop,
    /// Shard count (coreset-parallel only; defaults to min(sqrt(n/k), workers)).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Permute the dataset with this seed first.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    stop: Stop,
    /// Constant of the epsilon-mode thresholds.
    #[arg(long, default_value_t = divmax::coreset::stream::DEFAULT_C)]
    c: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Seq,
    Stream,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    LocalSearch,
    Exhaustive,
}

#[derive(Args)]
struct SolverOpts {
    #[arg(long, default_value = "sum")]
    diversity: DiversityKind,
    #[arg(long, value_enum, default_value = "local-search")]
    solver: SolverArg,
    /// Local search accepts swaps improving by more than a factor 1 + gamma.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Candidate-set budget of exhaustive search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
}

impl SolverOpts {
    fn solver(&self) -> SolverKind {
        match self.solver {
            SolverArg::LocalSearch => SolverKind::LocalSearch { gamma: self.gamma },
            SolverArg::Exhaustive => SolverKind::Exhaustive,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    stop: Stop,
    #[command(flatten)]
    opts: SolverOpts,
    #[arg(long, value_enum, default_value = "seq")]
    pipeline: PipelineArg,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "sum")]
    diversity: DiversityKind,
    /// Comma-separated point ids of a solution to check.
    #[arg(long, value_delimiter = ',')]
    ids: Vec<String>,
    /// Subset budget of the brute-force optimum.
    #[arg(long, default_value_t = divmax::oracle::OPTIMUM_BUDGET as u64)]
    budget: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 16)]
    clusters: usize,
    #[arg(long, default_value_t = 16)]
    categories: usize,
    #[arg(long, value_enum, default_value = "partition")]
    matroid: MatroidArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partition: total of the quotas.
    #[arg(long, default_value_t = 89)]
    rank: usize,
    /// Transversal: most categories per point.
    #[arg(long, default_value_t = 3)]
    max_categories: usize,
    #[arg(long, default_value_t = 0.25)]
    spread: f64,
    /// Output prefix: writes PREFIX.jsonl and PREFIX.matroid.json.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatroidArg {
    Partition,
    Transversal,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    opts: SolverOpts,
    /// Cluster counts of the quality sweep.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256")]
    taus: Vec<usize>,
    /// Cluster count of the parallel timing sweep.
    #[arg(long, default_value_t = 64)]
    parallel_tau: usize,
    /// Shard counts of the parallel timing sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,4")]
    parallelism: Vec<usize>,
}

fn emit(output: Option<&Path>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    match output {
        Some(p) => {
            let mut f = File::create(p)?;
            writeln!(f, "{text}")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn load(input: &Input, seed: Option<u64>) -> Result<(Dataset, divmax::Matroid)> {
    let (d, m) = ingest(&input.input, &input.matroid, input.metric)?;
    Ok(match seed {
        Some(s) => (d.permuted(s), m),
        None => (d, m),
    })
}

fn coreset_json(c: &Coreset, id: impl Fn(usize) -> String, extra: Value) -> Value {
    let clusters: Vec<Value> = c
        .clusters
        .iter()
        .map(|cl| {
            json!({
                "center": id(cl.center),
                "shard": cl.shard,
                "selected": cl.selected.iter().map(|&i| id(i)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut v = json!({
        "size": c.len(),
        "tau": c.tau,
        "radius": c.radius,
        "shard_radii": c.shard_radii,
        "ids": c.ids.iter().map(|&i| id(i)).collect::<Vec<_>>(),
        "clusters": clusters,
    });
    if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
        a.extend(b);
    }
    v
}

fn coreset_cmd(args: &CoresetArgs, parallel: bool) -> Result<i32> {
    let (d, m) = load(&args.input, args.seed)?;
    let k = args.input.k;
    let stop = args.stop.get();
    let (c, ell) = if parallel {
        let ell = args
            .parallelism
            .unwrap_or_else(|| default_parallelism(d.len(), k, workers()));
        (parallel_coreset(&d, &m, k, ell, stop)?, ell)
    } else {
        (seq_coreset(&d, &m, k, stop)?, 1)
    };
    let gamma = m.bind(&d)?.max_categories_per_point();
    let extra = json!({ "parallelism": ell, "size_bound": size_bound(m.kind(), k, c.tau, gamma) });
    emit(
        args.input.output.as_deref(),
        &coreset_json(&c, |i| d.point(i).id().to_string(), extra),
    )?;
    Ok(0)
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn stream_cmd(args: &StreamArgs) -> Result<i32> {
    let m = load_matroid(&args.input.matroid)?;
    let mode = match args.stop.get() {
        CoresetStop::Epsilon(epsilon) => StreamMode::Epsilon { epsilon, c: args.c },
        CoresetStop::Tau(tau) => StreamMode::Tau { tau },
    };
    let mut st = StreamState::new(&m, args.input.k, mode, args.input.metric)?;
    let mut seen = std::collections::HashSet::new();
    for p in PointReader::open(&args.input.input)? {
        let p = p?;
        if !seen.insert(p.id().to_string()) {
            return Err(Error::Input(format!("duplicate point id {:?}", p.id())));
        }
        st.feed(p)?;
    }
    let consumed = st.count();
    let out = st.finalize()?;
    let pos: Vec<usize> = out.coreset.ids.clone();
    let id = |i: usize| {
        let local = pos.binary_search(&i).expect("coreset ids index the retained points");
        out.points.point(local).id().to_string()
    };
    let extra = json!({ "consumed": consumed, "radius_is_bound": !out.radius_measured });
    emit(args.input.output.as_deref(), &coreset_json(&out.coreset, id, extra))?;
    Ok(0)
}

fn solve_cmd(args: &SolveArgs) -> Result<i32> {
    let (d, m) = load(&args.input, None)?;
    let pipeline = match args.pipeline {
        PipelineArg::Seq => Pipeline::Seq,
        PipelineArg::Stream => Pipeline::Stream,
        PipelineArg::Parallel => Pipeline::Parallel(args.parallelism),
    };
    let cfg = RunConfig {
        input: Some(args.input.input.display().to_string()),
        matroid: Some(args.input.matroid.display().to_string()),
        solve: SolveConfig {
            k: args.input.k,
            kind: args.opts.diversity,
            pipeline,
            stop: args.stop.get(),
            solver: args.opts.solver(),
            budget: args.opts.budget,
        },
        seed: args.opts.seed,
        repetitions: args.opts.reps,
    };
    let report = run(&d, &m, &cfg)?;
    emit(args.input.output.as_deref(), &serde_json::to_value(&report).expect("report serializes"))?;
    for r in report.records.iter().filter(|r| r.error.is_some()) {
        eprintln!("repetition {} failed: {}", r.repetition, r.error.as_deref().unwrap_or_default());
    }
    Ok(report.exit_code())
}

fn verify_cmd(args: &VerifyArgs) -> Result<i32> {
    let (d, m) = load(&args.input, None)?;
    let k = args.input.k;
    let opt = divmax::oracle::brute_force_optimum_with_budget(&d, &m, k, args.diversity, u128::from(args.budget))?;
    let pairs = divmax::diversity::pair_count(args.diversity, k).f;
    let mut v = json!({
        "k": k,
        "diversity": args.diversity,
        "optimum": opt.value,
        "optimum_ids": opt.ids.iter().map(|&i| d.point(i).id()).collect::<Vec<_>>(),
        "average_farness": opt.value / pairs as f64,
        "diameter": d.diameter(),
    });
    let mut code = 0;
    if !args.ids.is_empty() {
        let ids = d.resolve(&args.ids)?;
        let independent = m.bind(&d)?.is_independent(&ids)?;
        let value = evaluate(&d, args.diversity, &ids)?;
        let ok = independent && ids.len() == k;
        if !ok {
            code = 1;
        }
        v["solution"] = json!({
            "independent": independent,
            "size_ok": ids.len() == k,
            "value": value,
            "ratio": if opt.value > 0.0 { value / opt.value } else { 1.0 },
        });
    }
    emit(args.input.output.as_deref(), &v)?;
    Ok(code)
}

fn gen_cmd(args: &GenArgs) -> Result<i32> {
    let spec = SynthSpec {
        n: args.n,
        dim: args.dim,
        clusters: args.clusters,
        categories: args.categories,
        matroid: match args.matroid {
            MatroidArg::Partition => SynthMatroid::Partition,
            MatroidArg::Transversal => SynthMatroid::Transversal,
        },
        seed: args.seed,
        spread: args.spread,
        rank: args.rank,
        max_categories: args.max_categories,
    };
    let (pts, cfg) = generate(&spec)?;
    let base = args.output.display().to_string();
    write_points(File::create(format!("{base}.jsonl"))?, &pts)?;
    write_matroid_config(File::create(format!("{base}.matroid.json"))?, &cfg)?;
    Ok(0)
}

fn bench_cmd(args: &BenchArgs) -> Result<i32> {
    let (d, m) = load(&args.input, None)?;
    let mut cfg = BenchConfig::new(args.input.k, args.opts.seed);
    cfg.kind = args.opts.diversity;
    cfg.solver = args.opts.solver();
    cfg.taus = args.taus.clone();
    cfg.parallel_tau = args.parallel_tau;
    cfg.parallelism = args.parallelism.clone();
    cfg.repetitions = args.opts.reps;
    cfg.budget = args.opts.budget;
    let report = bench(&d, &m, &cfg)?;
    eprint!("{}", bench_table(&report));
    emit(args.input.output.as_deref(), &serde_json::to_value(&report).expect("report serializes"))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::CoresetSeq(a) => coreset_cmd(a, false),
        Command::CoresetParallel(a) => coreset_cmd(a, true),
        Command::CoresetStream(a) => stream_cmd(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Gen(a) => gen_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
